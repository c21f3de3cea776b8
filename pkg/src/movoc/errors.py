"""Exception types shared across the toolkit."""


class MovocError(Exception):
    """Base class for toolkit errors."""


class FormatError(MovocError, ValueError):
    """A data file or record does not match its documented format."""


class ModelLoadError(MovocError, ValueError):
    """A tokenizer model document is missing, truncated or invalid."""


class ConfigError(MovocError, ValueError):
    """A configuration value or command-line argument is unusable."""
