"""Intrinsic segmentation quality metrics.

Boundary metrics compare the interior span endpoints of an encoding with
the gold morpheme boundaries of the same word. MorphScore is the
recall-oriented per-word mean (unsegmented predictions and boundary-free
gold words are excluded, and the exclusions are always reported);
boundary precision/recall pool boundaries over all words. Diversity of
the token distribution is summarized by Renyi entropy in nats.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .bpe import Encoding
from .corpus import SegmentedCorpus, SurfaceSegmentation
from .segmenter import TokenizerModel, encode, encode_text


@dataclass(frozen=True)
class MetricReport:
    morph_score: float | None
    boundary_precision: float | None
    boundary_recall: float | None
    renyi_entropy: float
    alpha: float
    tokens_per_word: float
    words_total: int
    words_unsegmented: int
    words_excluded_nonprojectable: int
    entropy_unit: str = "nats"

    def to_dict(self) -> dict:
        return {
            "morph_score": self.morph_score,
            "boundary_precision": self.boundary_precision,
            "boundary_recall": self.boundary_recall,
            "renyi_entropy": self.renyi_entropy,
            "alpha": self.alpha,
            "tokens_per_word": self.tokens_per_word,
            "words_total": self.words_total,
            "words_unsegmented": self.words_unsegmented,
            "words_excluded_nonprojectable": self.words_excluded_nonprojectable,
            "entropy_unit": self.entropy_unit,
        }


@dataclass(frozen=True)
class MorphScoreCounts:
    total: int
    scored: int
    excluded_unsegmented: int
    excluded_no_gold: int


Pair = tuple[Encoding, SurfaceSegmentation]


def _check_pair(encoding: Encoding, gold) -> None:
    if encoding.length() != len(gold.surface):
        raise ValueError(
            f"encoding covers {encoding.length()} characters but gold word "
            f"{gold.surface!r} has {len(gold.surface)}"
        )


def morph_score(
    pairs: Iterable[Pair], *, strict: bool = False
) -> tuple[float | None, MorphScoreCounts]:
    """Mean per-word alignment of predicted with gold boundaries.

    A word scores the fraction of its gold boundaries that were predicted
    (all-or-nothing with strict=True). Words the tokenizer left whole and
    words without gold boundaries are excluded; the value is None when
    nothing remains.
    """
    scores = []
    total = unsegmented = no_gold = 0
    for encoding, gold in pairs:
        _check_pair(encoding, gold)
        total += 1
        gold_set = set(gold.boundaries)
        if not gold_set:
            no_gold += 1
            continue
        predicted = encoding.boundaries()
        if not predicted:
            unsegmented += 1
            continue
        hit = len(predicted & gold_set)
        if strict:
            scores.append(1.0 if hit == len(gold_set) else 0.0)
        else:
            scores.append(hit / len(gold_set))
    counts = MorphScoreCounts(total, len(scores), unsegmented, no_gold)
    if not scores:
        return None, counts
    return math.fsum(scores) / len(scores), counts


def _pool(pairs: Iterable[Pair]) -> tuple[int, int, int, list[tuple[int, int]]]:
    hits = predicted_total = gold_total = 0
    per_word: list[tuple[int, int]] = []  # (hits, predicted) for macro averaging
    for encoding, gold in pairs:
        _check_pair(encoding, gold)
        gold_set = set(gold.boundaries)
        predicted = encoding.boundaries()
        gold_total += len(gold_set)
        if predicted:
            hit = len(predicted & gold_set)
            hits += hit
            predicted_total += len(predicted)
            per_word.append((hit, len(predicted)))
    return hits, predicted_total, gold_total, per_word


def boundary_precision(
    pairs: Iterable[Pair], *, average: str = "micro"
) -> float | None:
    """Fraction of predicted boundaries that are gold boundaries.

    Micro-averaged by default (boundaries pooled over words; words with no
    predicted boundary drop out of both sums); average="macro" instead
    averages per-word precision over words with predictions. None when no
    word has a predicted boundary.
    """
    if average not in ("micro", "macro"):
        raise ValueError(f"average must be 'micro' or 'macro', got {average!r}")
    hits, predicted_total, _, per_word = _pool(pairs)
    if predicted_total == 0:
        return None
    if average == "macro":
        return math.fsum(h / p for h, p in per_word) / len(per_word)
    return hits / predicted_total


def boundary_recall(pairs: Iterable[Pair]) -> float | None:
    """Fraction of gold boundaries recovered, pooled over all words (an
    unsegmented prediction simply misses its word's gold boundaries).
    None when no word has a gold boundary."""
    hits, _, gold_total, _ = _pool(pairs)
    if gold_total == 0:
        return None
    return hits / gold_total


def renyi_entropy(token_counts: Mapping[str, int], alpha: float = 2.0) -> float:
    """Renyi entropy of the token frequency distribution, in nats:
    (1 / (1 - alpha)) * ln(sum p_i**alpha)."""
    if not token_counts:
        raise ValueError("token_counts is empty; entropy is undefined")
    if alpha <= 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    if alpha == 1:
        raise ValueError(
            "alpha=1 is the Shannon limit; this function requires alpha != 1"
        )
    total = sum(token_counts.values())
    if total <= 0 or any(c < 0 for c in token_counts.values()):
        raise ValueError("token counts must be non-negative with a positive sum")
    power_sum = math.fsum((count / total) ** alpha for count in token_counts.values())
    return math.log(power_sum) / (1.0 - alpha)


def evaluate(
    model: TokenizerModel,
    gold: SegmentedCorpus,
    raw_text: Iterable[str] | None = None,
    *,
    alpha: float = 2.0,
    strict_morph: bool = False,
    average: str = "micro",
    excluded_nonprojectable: int = 0,
) -> MetricReport:
    """Encode a gold corpus and compute the full metric report.

    Boundary metrics treat each gold entry as one test item. Token
    statistics weight entries by their corpus counts. Entropy uses token
    frequencies from raw_text lines when given, otherwise from the gold
    surfaces weighted by counts.
    """
    pairs = [(encode(model, seg.surface), seg) for seg, _ in gold.entries]
    ms, counts = morph_score(pairs, strict=strict_morph)
    precision = boundary_precision(pairs, average=average)
    recall = boundary_recall(pairs)

    token_freqs: Counter[str] = Counter()
    total_tokens = total_words = 0
    for (encoding, _), (_, count) in zip(pairs, gold.entries):
        total_tokens += len(encoding.tokens) * count
        total_words += count
    if raw_text is not None:
        for line in raw_text:
            for encoding in encode_text(model, line):
                token_freqs.update(encoding.tokens)
    else:
        for (encoding, _), (_, count) in zip(pairs, gold.entries):
            for token in encoding.tokens:
                token_freqs[token] += count

    return MetricReport(
        morph_score=ms,
        boundary_precision=precision,
        boundary_recall=recall,
        renyi_entropy=renyi_entropy(token_freqs, alpha),
        alpha=alpha,
        tokens_per_word=total_tokens / total_words if total_words else 0.0,
        words_total=counts.total,
        words_unsegmented=counts.excluded_unsegmented,
        words_excluded_nonprojectable=excluded_nonprojectable,
    )
