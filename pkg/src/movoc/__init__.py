"""Morpheme-aware subword tokenization for Ge'ez-script languages.

Builds hybrid vocabularies from BPE tokens and analyzer-extracted
morphemes, trains BPE tokenizers whose merges never cross gold morpheme
boundaries, and scores segmentations against gold morphology.
"""

__version__ = "0.1.0"

from .bpe import Encoding, MergeTable, Vocabulary, apply_merge, encode_bpe, train_bpe
from .corpus import (
    CanonicalAnalysis,
    MorphUnit,
    SegmentedCorpus,
    SurfaceSegmentation,
    WordCounts,
    gen_synthetic_corpus,
    parse_hornmorpho_notation,
    parse_role_annotation,
    parse_surface_segmentation,
    project_to_surface,
    read_plain_corpus,
)
from .errors import ConfigError, FormatError, ModelLoadError, MovocError
from .metrics import (
    MetricReport,
    boundary_precision,
    boundary_recall,
    evaluate,
    morph_score,
    renyi_entropy,
)
from .pretok import (
    NormalizationPolicy,
    NormalizedText,
    PreToken,
    load_policy,
    normalize,
    pretokenize,
)
from .segmenter import (
    TokenizerModel,
    build_model,
    decode,
    encode,
    encode_text,
    load_model,
    save_model,
    train_constrained,
)
from .vocab import (
    Budget,
    LanguageSpec,
    MorphemeList,
    MoVoCConfig,
    build_movoc_vocab,
    compute_budgets,
    extract_morphemes,
)

__all__ = [
    "__version__",
    "Budget",
    "CanonicalAnalysis",
    "ConfigError",
    "Encoding",
    "FormatError",
    "LanguageSpec",
    "MergeTable",
    "MetricReport",
    "ModelLoadError",
    "MorphUnit",
    "MorphemeList",
    "MoVoCConfig",
    "MovocError",
    "NormalizationPolicy",
    "NormalizedText",
    "PreToken",
    "SegmentedCorpus",
    "SurfaceSegmentation",
    "TokenizerModel",
    "Vocabulary",
    "WordCounts",
    "apply_merge",
    "boundary_precision",
    "boundary_recall",
    "build_model",
    "build_movoc_vocab",
    "compute_budgets",
    "decode",
    "encode",
    "encode_bpe",
    "encode_text",
    "evaluate",
    "extract_morphemes",
    "gen_synthetic_corpus",
    "load_model",
    "load_policy",
    "morph_score",
    "normalize",
    "parse_hornmorpho_notation",
    "parse_role_annotation",
    "parse_surface_segmentation",
    "pretokenize",
    "project_to_surface",
    "read_plain_corpus",
    "renyi_entropy",
    "save_model",
    "train_bpe",
    "train_constrained",
]
