"""Hybrid vocabulary construction: per-language budgets, frequency-based
morpheme extraction, and the merged morpheme+BPE vocabulary.

The total budget ``size`` is split evenly across languages (remainder to
the first), then per language into a morpheme share ``ratio`` and a BPE
share ``1 - ratio``. Special tokens and seed characters live outside the
budget, which keeps the ratio=0 and ratio=1 degenerate cases exact.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .bpe import Vocabulary
from .corpus import CanonicalAnalysis, SegmentedCorpus
from .errors import ConfigError

SPECIAL_TOKENS = ("<unk>", "<pad>", "<bos>", "<eos>")


@dataclass(frozen=True)
class LanguageSpec:
    tag: str
    plain: str | None = None
    segmented: str | None = None


@dataclass(frozen=True)
class MoVoCConfig:
    size: int
    ratio: float
    languages: tuple[LanguageSpec, ...]

    def __post_init__(self):
        if not self.languages:
            raise ConfigError("at least one language is required")
        if not 0.0 <= self.ratio <= 1.0:
            raise ConfigError(f"ratio must be in [0, 1], got {self.ratio}")
        if self.size < len(self.languages):
            raise ConfigError(
                f"size {self.size} leaves no budget for "
                f"{len(self.languages)} languages"
            )


@dataclass(frozen=True)
class Budget:
    language: str
    s_lang: int
    s_bpe: int
    s_morpheme: int

    def __post_init__(self):
        if self.s_bpe + self.s_morpheme != self.s_lang:
            raise ValueError(
                f"budget for {self.language}: {self.s_bpe} + {self.s_morpheme} "
                f"!= {self.s_lang}"
            )


@dataclass(frozen=True)
class MorphemeList:
    """Morphemes ranked by corpus frequency, non-increasing."""

    language: str
    entries: tuple[tuple[str, int], ...]

    def __post_init__(self):
        seen = set()
        prev = None
        for morph, freq in self.entries:
            if not morph:
                raise ValueError("morpheme strings must be non-empty")
            if morph in seen:
                raise ValueError(f"duplicate morpheme {morph!r}")
            seen.add(morph)
            if prev is not None and freq > prev:
                raise ValueError("morpheme frequencies must be non-increasing")
            prev = freq

    def __len__(self) -> int:
        return len(self.entries)

    def strings(self) -> tuple[str, ...]:
        return tuple(m for m, _ in self.entries)


def compute_budgets(config: MoVoCConfig) -> list[Budget]:
    """Split the total size across languages and morpheme/BPE shares.

    s_lang = floor(size / L) with the division remainder added to the
    first language; s_morpheme = floor(s_lang * ratio); s_bpe is the rest.
    """
    n = len(config.languages)
    base = config.size // n
    remainder = config.size - base * n
    budgets = []
    for i, spec in enumerate(config.languages):
        s_lang = base + (remainder if i == 0 else 0)
        s_morpheme = math.floor(s_lang * config.ratio)
        budgets.append(Budget(spec.tag, s_lang, s_lang - s_morpheme, s_morpheme))
    return budgets


def extract_morphemes(
    corpus: SegmentedCorpus | Iterable[tuple[CanonicalAnalysis, int]],
    k: int,
) -> MorphemeList:
    """Rank morphemes of a segmented or analyzed corpus by frequency.

    All unit forms count (stems and affixes alike), weighted by word
    counts; ties break lexicographically; the top k survive.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    freqs: Counter[str] = Counter()
    if isinstance(corpus, SegmentedCorpus):
        language = corpus.language
        for seg, count in corpus.entries:
            for morph in seg.morphs():
                freqs[morph] += count
    else:
        language = "und"
        for analysis, count in corpus:
            if count < 1:
                raise ValueError(f"count for {analysis.surface!r} must be >= 1")
            for unit in analysis.units:
                freqs[unit.form] += count
    ranked = sorted(freqs.items(), key=lambda item: (-item[1], item[0]))
    return MorphemeList(language, tuple(ranked[:k]))


def build_movoc_vocab(
    config: MoVoCConfig,
    bpe_vocabs: Sequence[Vocabulary],
    morpheme_lists: Sequence[MorphemeList],
) -> Vocabulary:
    """Merge per-language BPE vocabularies and morpheme lists.

    Dense ids follow a fixed order: specials, seed characters (union over
    languages, code-point order), morphemes by language order and rank,
    then BPE tokens by language order and rank. Duplicate strings keep the
    first-assigned entry, so a string that is both a morpheme and a BPE
    token stays a morpheme.
    """
    if len(bpe_vocabs) != len(config.languages) or len(morpheme_lists) != len(
        config.languages
    ):
        raise ConfigError(
            "one BPE vocabulary and one morpheme list per language required"
        )
    budgets = compute_budgets(config)
    for spec, budget, bv, ml in zip(config.languages, budgets, bpe_vocabs, morpheme_lists):
        n_bpe = sum(1 for e in bv if e.provenance == "bpe")
        if n_bpe > budget.s_bpe:
            raise ConfigError(
                f"language {spec.tag}: {n_bpe} BPE tokens exceed budget {budget.s_bpe}"
            )
        if len(ml) > budget.s_morpheme:
            raise ConfigError(
                f"language {spec.tag}: {len(ml)} morphemes exceed budget "
                f"{budget.s_morpheme}"
            )

    merged = Vocabulary()
    for token in SPECIAL_TOKENS:
        merged.add(token, "special")
    seeds = sorted({e.token for bv in bpe_vocabs for e in bv if e.provenance == "seed"})
    for ch in seeds:
        merged.add(ch, "seed")
    for spec, ml in zip(config.languages, morpheme_lists):
        for morph, _ in ml.entries:
            merged.add(morph, "morpheme", spec.tag)
    for spec, bv in zip(config.languages, bpe_vocabs):
        for entry in bv:
            if entry.provenance == "bpe":
                merged.add(entry.token, "bpe", spec.tag)
    return merged


def vocab_sizes(
    bpe_vocabs: Sequence[Vocabulary],
    morpheme_lists: Sequence[MorphemeList],
    merged: Vocabulary,
) -> dict[str, int]:
    """Raw-sum versus deduplicated accounting of a merged vocabulary."""
    raw = sum(len(v) for v in bpe_vocabs) + sum(len(m) for m in morpheme_lists)
    return {"raw_sum": raw, "deduplicated": len(merged)}
