"""Normalization and pre-tokenization for Ge'ez-script text.

Raw text is NFC-normalized, cleaned and whitespace-collapsed, then split
into word / punctuation / number pre-tokens. All offsets throughout the
toolkit are Unicode scalar offsets: every Ethiopic syllogram is a single
scalar, so morpheme boundaries always fall between scalars.
"""

from __future__ import annotations

import json
import string
import unicodedata
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError

ETHIOPIC_WORDSPACE = 0x1361

# Zero-width/formatting characters plus C0/C1 controls that survive NFC.
_DEFAULT_STRIP = frozenset(
    {0x00AD, 0x200B, 0x200C, 0x200D, 0x2060, 0xFEFF}
    | set(range(0x00, 0x09))
    | set(range(0x0E, 0x20))
    | {0x7F}
)

# Ethiopic punctuation U+1361-U+1368 plus ASCII punctuation.
_DEFAULT_PUNCT = frozenset(range(0x1361, 0x1369)) | frozenset(
    ord(c) for c in string.punctuation
)

# Ethiopic blocks plus printable Basic Latin. Characters outside these
# ranges still pass through normalization but classify as kind=other.
_DEFAULT_KEEP = (
    (0x0020, 0x007E),
    (0x1200, 0x137F),
    (0x1380, 0x139F),
    (0x2D80, 0x2DDF),
    (0xAB00, 0xAB2F),
)

_ETHIOPIC_DIGITS = frozenset(range(0x1369, 0x137D))


@dataclass(frozen=True)
class NormalizationPolicy:
    """Rules applied by :func:`normalize` and :func:`pretokenize`.

    ``strip_set`` and ``punct_set`` hold Unicode scalar values and must be
    disjoint. ``keep_scripts`` is a tuple of inclusive (lo, hi) code-point
    ranges; characters outside every range classify as kind=other.
    """

    treat_ethiopic_wordspace_as_space: bool = True
    strip_set: frozenset[int] = _DEFAULT_STRIP
    punct_set: frozenset[int] = _DEFAULT_PUNCT
    keep_scripts: tuple[tuple[int, int], ...] = _DEFAULT_KEEP

    def __post_init__(self):
        overlap = self.strip_set & self.punct_set
        if overlap:
            raise ConfigError(
                "strip_set and punct_set overlap on code points: "
                + ", ".join(f"U+{cp:04X}" for cp in sorted(overlap))
            )

    def in_kept_script(self, cp: int) -> bool:
        return any(lo <= cp <= hi for lo, hi in self.keep_scripts)


DEFAULT_POLICY = NormalizationPolicy()


@dataclass(frozen=True)
class NormalizedText:
    """NFC text with collapsed whitespace plus a map back to its source.

    ``source_offsets[i]`` is the offset, in the NFC form of the raw input,
    of the character that produced ``text[i]``. A space produced by
    collapsing a whitespace run maps to the first whitespace character of
    the run.
    """

    text: str
    source_offsets: tuple[int, ...]

    def __post_init__(self):
        if len(self.text) != len(self.source_offsets):
            raise ValueError("source_offsets must map every character of text")


@dataclass(frozen=True)
class PreToken:
    """One unit of normalized text: a word, punctuation mark, number or
    other-script run. ``span`` is half-open in scalar offsets."""

    text: str
    span: tuple[int, int]
    kind: str  # word | punctuation | number | other


def normalize(raw: str, policy: NormalizationPolicy | None = None) -> NormalizedText:
    """Clean raw text: NFC, wordspace replacement, stripping, whitespace
    collapsing. Empty input yields an empty NormalizedText."""
    policy = policy or DEFAULT_POLICY
    nfc = unicodedata.normalize("NFC", raw)

    chars: list[str] = []
    offsets: list[int] = []
    pending_space_at = -1
    for i, ch in enumerate(nfc):
        cp = ord(ch)
        if policy.treat_ethiopic_wordspace_as_space and cp == ETHIOPIC_WORDSPACE:
            ch = " "
        if ord(ch) in policy.strip_set:
            continue
        if ch.isspace():
            if pending_space_at < 0:
                pending_space_at = i
            continue
        if pending_space_at >= 0 and chars:
            chars.append(" ")
            offsets.append(pending_space_at)
        pending_space_at = -1
        chars.append(ch)
        offsets.append(i)
    return NormalizedText("".join(chars), tuple(offsets))


def _classify(cp: int, policy: NormalizationPolicy) -> str:
    if cp in policy.punct_set:
        return "punctuation"
    if 0x30 <= cp <= 0x39 or cp in _ETHIOPIC_DIGITS:
        return "number"
    if policy.in_kept_script(cp):
        return "word"
    return "other"


def pretokenize(
    text: NormalizedText | str, policy: NormalizationPolicy | None = None
) -> list[PreToken]:
    """Split normalized text into pre-tokens.

    Every punct_set character becomes its own kind=punctuation token;
    digit runs become kind=number and are never merged with letters; runs
    outside the kept script ranges become kind=other. Spans partition the
    non-space content of the text exactly.
    """
    policy = policy or DEFAULT_POLICY
    s = text.text if isinstance(text, NormalizedText) else text

    tokens: list[PreToken] = []
    start = -1
    kind = ""

    def flush(end: int):
        nonlocal start
        if start >= 0:
            tokens.append(PreToken(s[start:end], (start, end), kind))
            start = -1

    for i, ch in enumerate(s):
        if ch.isspace():
            flush(i)
            continue
        k = _classify(ord(ch), policy)
        if k == "punctuation":
            flush(i)
            tokens.append(PreToken(ch, (i, i + 1), "punctuation"))
            continue
        if start < 0:
            start, kind = i, k
        elif k != kind:
            flush(i)
            start, kind = i, k
    flush(len(s))
    return tokens


def _parse_code_point(value, key: str) -> int:
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        text = value.strip()
        for prefix in ("U+", "u+", "0x", "0X"):
            if text.startswith(prefix):
                text = text[len(prefix):]
                break
        try:
            return int(text, 16)
        except ValueError:
            pass
    raise ConfigError(f"policy field {key!r}: {value!r} is not a hex code point")


def policy_from_json(doc: dict) -> NormalizationPolicy:
    """Build a policy from a JSON document.

    Recognized keys: ``wordspace_as_space`` (bool), ``strip`` and ``punct``
    (arrays of hex code points), ``keep`` (array of [lo, hi] hex ranges).
    Omitted keys fall back to the defaults.
    """
    if not isinstance(doc, dict):
        raise ConfigError("policy document must be a JSON object")
    known = {"wordspace_as_space", "strip", "punct", "keep"}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"policy document has unknown keys: {sorted(unknown)}")

    kwargs = {}
    if "wordspace_as_space" in doc:
        if not isinstance(doc["wordspace_as_space"], bool):
            raise ConfigError("policy field 'wordspace_as_space' must be a boolean")
        kwargs["treat_ethiopic_wordspace_as_space"] = doc["wordspace_as_space"]
    for key, field in (("strip", "strip_set"), ("punct", "punct_set")):
        if key in doc:
            if not isinstance(doc[key], list):
                raise ConfigError(f"policy field {key!r} must be an array")
            kwargs[field] = frozenset(_parse_code_point(v, key) for v in doc[key])
    if "keep" in doc:
        ranges = []
        for pair in doc["keep"]:
            if not (isinstance(pair, list) and len(pair) == 2):
                raise ConfigError("policy field 'keep' must hold [lo, hi] pairs")
            ranges.append(
                (_parse_code_point(pair[0], "keep"), _parse_code_point(pair[1], "keep"))
            )
        kwargs["keep_scripts"] = tuple(ranges)
    return NormalizationPolicy(**kwargs)


def load_policy(path: str | Path) -> NormalizationPolicy:
    """Load a NormalizationPolicy from a JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"policy file {path}: {exc}") from exc
    return policy_from_json(doc)
