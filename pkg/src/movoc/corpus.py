"""Corpus ingestion, morphological annotation formats and synthetic data.

Two tiers of annotation are kept apart on purpose:

* :class:`SurfaceSegmentation` — concatenative splits of the surface word,
  carrying interior boundary offsets. This is the only grade of annotation
  the boundary metrics accept.
* :class:`CanonicalAnalysis` — analyzer output whose unit forms may fuse at
  the surface (the concatenation of forms need not equal the word). Usable
  for morpheme extraction; projected onto the surface only when the forms
  concatenate exactly, never by fuzzy alignment.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Sequence

from .errors import FormatError
from .pretok import NormalizationPolicy, normalize, pretokenize

ANNOTATION_ROLES = ("prefix", "root", "suffix", "infix", "clitic")
_CORE_ROLES = frozenset({"root", "stem"})
_ALL_ROLES = frozenset(ANNOTATION_ROLES) | {"stem"}


@dataclass(frozen=True)
class SurfaceSegmentation:
    """A word plus the interior offsets of its gold morpheme boundaries."""

    surface: str
    boundaries: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.surface:
            raise ValueError("surface word must be non-empty")
        prev = 0
        for b in self.boundaries:
            if not 0 < b < len(self.surface):
                raise ValueError(
                    f"boundary {b} outside the interior of {self.surface!r}"
                )
            if b <= prev:
                raise ValueError(f"boundaries of {self.surface!r} must increase")
            prev = b

    def morphs(self) -> tuple[str, ...]:
        """Split the surface at the boundary offsets."""
        cuts = (0,) + self.boundaries + (len(self.surface),)
        return tuple(self.surface[a:b] for a, b in zip(cuts, cuts[1:]))

    @classmethod
    def from_morphs(cls, morphs: Sequence[str]) -> "SurfaceSegmentation":
        surface = "".join(morphs)
        boundaries, pos = [], 0
        for m in morphs[:-1]:
            pos += len(m)
            boundaries.append(pos)
        return cls(surface, tuple(boundaries))


@dataclass(frozen=True)
class MorphUnit:
    form: str
    role: str

    def __post_init__(self):
        if not self.form:
            raise ValueError("morph unit form must be non-empty")
        if self.role not in _ALL_ROLES:
            raise ValueError(f"unknown morph role {self.role!r}")


@dataclass(frozen=True)
class CanonicalAnalysis:
    """Analyzer-grade analysis: ordered unit forms with roles.

    Exactly one unit carries role root or stem; the concatenation of the
    forms may differ from the surface (fusional morphology).
    """

    surface: str
    units: tuple[MorphUnit, ...]

    def __post_init__(self):
        cores = [u for u in self.units if u.role in _CORE_ROLES]
        if len(cores) != 1:
            raise FormatError(
                f"analysis of {self.surface!r} must have exactly one "
                f"root/stem unit, found {len(cores)}"
            )


@dataclass(frozen=True)
class SegmentedCorpus:
    """Unique surface words with gold segmentations and counts."""

    entries: tuple[tuple[SurfaceSegmentation, int], ...]
    language: str = "und"

    def __post_init__(self):
        seen = set()
        for seg, count in self.entries:
            if count < 1:
                raise ValueError(f"count for {seg.surface!r} must be >= 1")
            if seg.surface in seen:
                raise ValueError(f"duplicate surface {seg.surface!r} in corpus")
            seen.add(seg.surface)

    def __len__(self) -> int:
        return len(self.entries)

    def word_counts(self) -> "WordCounts":
        return WordCounts(
            {seg.surface: count for seg, count in self.entries}, self.language
        )


@dataclass
class WordCounts:
    """Frequencies of whitespace-free words."""

    counts: dict[str, int] = field(default_factory=dict)
    language: str = "und"

    def __len__(self) -> int:
        return len(self.counts)


def parse_surface_segmentation(line: str) -> SurfaceSegmentation:
    """Parse one record ``surface<TAB>m1|m2|...|mk``.

    The concatenation of the morphs must reproduce the surface exactly.
    """
    parts = line.rstrip("\n").split("\t")
    if len(parts) < 2:
        raise FormatError(f"expected 'surface<TAB>morphs', got {line!r}")
    surface, morph_field = parts[0], parts[1]
    morphs = morph_field.split("|")
    if any(not m for m in morphs):
        raise FormatError(f"empty morph in segmentation of {surface!r}")
    if "".join(morphs) != surface:
        raise FormatError(
            f"morphs {'|'.join(morphs)!r} do not concatenate to surface {surface!r}"
        )
    return SurfaceSegmentation.from_morphs(morphs)


def format_surface_segmentation(seg: SurfaceSegmentation) -> str:
    """Inverse of :func:`parse_surface_segmentation` for canonical lines."""
    return f"{seg.surface}\t{'|'.join(seg.morphs())}"


def parse_hornmorpho_notation(raw: str, surface: str) -> CanonicalAnalysis:
    """Parse an analyzer segmentation string such as ``-አል- <ሰበር> ኡ- ም---``.

    Whitespace separates slot groups; within a group, hyphens delimit
    morphs and a lone ``-`` (or any run of hyphens with nothing between)
    marks an absent morpheme. The stem is the single ``<...>`` group;
    morphs before it become prefixes, after it suffixes.
    """
    groups = raw.split()
    units: list[MorphUnit] = []
    stem_seen = False
    for group in groups:
        if group.startswith("<") or group.endswith(">"):
            if not (group.startswith("<") and group.endswith(">")):
                raise FormatError(f"malformed stem group {group!r} in {raw!r}")
            inner = group[1:-1]
            if "<" in inner or ">" in inner:
                raise FormatError(f"nested angle brackets in {group!r}")
            if stem_seen:
                raise FormatError(f"more than one stem group in {raw!r}")
            if not inner:
                raise FormatError(f"empty stem group in {raw!r}")
            stem_seen = True
            units.append(MorphUnit(inner, "stem"))
            continue
        if "<" in group or ">" in group:
            raise FormatError(f"stray angle bracket in group {group!r}")
        role = "suffix" if stem_seen else "prefix"
        for piece in group.split("-"):
            if piece:
                units.append(MorphUnit(piece, role))
    if not stem_seen:
        raise FormatError(f"no <stem> group in analysis {raw!r}")
    return CanonicalAnalysis(surface, tuple(units))


def parse_role_annotation(record: dict) -> CanonicalAnalysis:
    """Parse an annotation object ``{"surface": ..., "units": [{"form", "role"}]}``.

    Roles must come from {prefix, root, suffix, infix, clitic}; exactly one
    unit must be the root.
    """
    if not isinstance(record, dict):
        raise FormatError("annotation record must be a JSON object")
    surface = record.get("surface")
    units_raw = record.get("units")
    if not isinstance(surface, str) or not surface:
        raise FormatError("annotation record needs a non-empty 'surface' string")
    if not isinstance(units_raw, list):
        raise FormatError(f"annotation of {surface!r} needs a 'units' array")
    units = []
    for item in units_raw:
        if not isinstance(item, dict) or "form" not in item or "role" not in item:
            raise FormatError(f"unit of {surface!r} must have 'form' and 'role'")
        form, role = item["form"], item["role"]
        if role not in ANNOTATION_ROLES:
            raise FormatError(
                f"unknown role {role!r} for {surface!r}; expected one of "
                + ", ".join(ANNOTATION_ROLES)
            )
        if not isinstance(form, str) or not form:
            raise FormatError(f"empty form in annotation of {surface!r}")
        units.append(MorphUnit(form, role))
    return CanonicalAnalysis(surface, tuple(units))


def project_to_surface(analysis: CanonicalAnalysis) -> SurfaceSegmentation | None:
    """Project a canonical analysis onto the surface word.

    Succeeds only when the unit forms concatenate to the surface exactly;
    fusional analyses return None and are excluded from boundary metrics
    rather than fuzzily aligned.
    """
    if "".join(u.form for u in analysis.units) != analysis.surface:
        return None
    return SurfaceSegmentation.from_morphs([u.form for u in analysis.units])


def _decode_lines(stream: Iterable[str | bytes] | IO) -> Iterator[str]:
    for lineno, line in enumerate(stream, start=1):
        if isinstance(line, bytes):
            try:
                line = line.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise FormatError(f"line {lineno}: invalid UTF-8 ({exc})") from exc
        yield line


def read_plain_corpus(
    stream: Iterable[str | bytes] | IO,
    policy: NormalizationPolicy | None = None,
    language: str = "und",
) -> WordCounts:
    """Count kind=word pre-tokens of a one-sentence-per-line corpus.

    Byte streams are decoded per line so that encoding errors report the
    offending line number.
    """
    counts: Counter[str] = Counter()
    for line in _decode_lines(stream):
        text = normalize(line, policy)
        for tok in pretokenize(text, policy):
            if tok.kind == "word":
                counts[tok.text] += 1
    return WordCounts(dict(counts), language)


def read_gold_file(
    stream: Iterable[str | bytes] | IO, language: str = "und"
) -> SegmentedCorpus:
    """Read a gold segmentation TSV: ``surface<TAB>m1|m2[<TAB>count]``.

    Lines starting with ``#`` and blank lines are skipped. The optional
    third column carries a count (default 1); repeating a surface with the
    same segmentation accumulates its count, while a conflicting repeat is
    an error.
    """
    segs: dict[str, SurfaceSegmentation] = {}
    counts: Counter[str] = Counter()
    for lineno, line in enumerate(_decode_lines(stream), start=1):
        stripped = line.strip("\n")
        if not stripped.strip() or stripped.lstrip().startswith("#"):
            continue
        try:
            seg = parse_surface_segmentation(stripped)
            columns = stripped.split("\t")
            count = 1
            if len(columns) >= 3 and columns[2]:
                count = int(columns[2])
                if count < 1:
                    raise FormatError(f"count must be >= 1, got {count}")
        except FormatError as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
        except ValueError as exc:
            raise FormatError(f"line {lineno}: bad count column ({exc})") from exc
        previous = segs.get(seg.surface)
        if previous is not None and previous.boundaries != seg.boundaries:
            raise FormatError(
                f"line {lineno}: surface {seg.surface!r} repeated with a "
                "different segmentation"
            )
        segs[seg.surface] = seg
        counts[seg.surface] += count
    entries = tuple((segs[w], counts[w]) for w in segs)
    return SegmentedCorpus(entries, language)


def write_gold_file(corpus: SegmentedCorpus, sink: IO[str]) -> None:
    """Write a SegmentedCorpus in the gold TSV format (count column kept
    only when a count exceeds 1)."""
    for seg, count in corpus.entries:
        line = format_surface_segmentation(seg)
        if count != 1:
            line += f"\t{count}"
        sink.write(line + "\n")


def read_annotation_file(
    stream: Iterable[str | bytes] | IO,
) -> list[CanonicalAnalysis]:
    """Read a JSONL annotation file, one role-annotated word per line."""
    analyses = []
    for lineno, line in enumerate(_decode_lines(stream), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"line {lineno}: invalid JSON ({exc})") from exc
        try:
            analyses.append(parse_role_annotation(record))
        except FormatError as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
    return analyses


def project_corpus(
    analyses: Iterable[CanonicalAnalysis], language: str = "und"
) -> tuple[SegmentedCorpus, int]:
    """Project canonical analyses to a surface corpus.

    Returns the corpus of projectable words plus the number of analyses
    dropped because their forms do not concatenate to the surface. A
    repeated surface with an agreeing projection accumulates its count;
    disagreeing repeats are an error.
    """
    segs: dict[str, SurfaceSegmentation] = {}
    counts: Counter[str] = Counter()
    dropped = 0
    for analysis in analyses:
        seg = project_to_surface(analysis)
        if seg is None:
            dropped += 1
            continue
        previous = segs.get(seg.surface)
        if previous is not None and previous.boundaries != seg.boundaries:
            raise FormatError(
                f"surface {seg.surface!r} annotated with conflicting segmentations"
            )
        segs[seg.surface] = seg
        counts[seg.surface] += 1
    entries = tuple((segs[w], counts[w]) for w in segs)
    return SegmentedCorpus(entries, language), dropped


def merge_counts_with_gold(
    counts: WordCounts, gold: SegmentedCorpus
) -> SegmentedCorpus:
    """Combine corpus frequencies with gold boundaries for training.

    Words with an analysis keep their gold boundaries; words seen only in
    the plain corpus train unconstrained (empty boundary set). Frequencies
    come from the plain corpus where available, else from the gold counts.
    """
    gold_by_surface = {seg.surface: (seg, count) for seg, count in gold.entries}
    entries = []
    for word, count in counts.counts.items():
        seg = (
            gold_by_surface[word][0]
            if word in gold_by_surface
            else SurfaceSegmentation(word)
        )
        entries.append((seg, count))
    for surface, (seg, count) in gold_by_surface.items():
        if surface not in counts.counts:
            entries.append((seg, count))
    return SegmentedCorpus(tuple(entries), counts.language or gold.language)


# Small Ethiopic letter inventory used for synthetic material.
SYNTHETIC_ALPHABET = tuple(chr(cp) for cp in range(0x1200, 0x1220))


def gen_inventories(
    seed: int,
    sizes: tuple[int, int, int],
    alphabet: Sequence[str] = SYNTHETIC_ALPHABET,
) -> tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]:
    """Deterministically draw distinct prefix/stem/suffix inventories.

    Prefixes and suffixes are 1-2 characters, stems 2-4; the three
    inventories are mutually disjoint as whole strings.
    """
    rng = random.Random(seed)
    taken: set[str] = set()

    def draw(n: int, lo: int, hi: int) -> tuple[str, ...]:
        out = []
        while len(out) < n:
            form = "".join(rng.choice(alphabet) for _ in range(rng.randint(lo, hi)))
            if form not in taken:
                taken.add(form)
                out.append(form)
        return tuple(out)

    n_pre, n_stem, n_suf = sizes
    return draw(n_pre, 1, 2), draw(n_stem, 2, 4), draw(n_suf, 1, 2)


def gen_synthetic_corpus(
    seed: int,
    n_words: int,
    inventory: tuple[Sequence[str], Sequence[str], Sequence[str]],
    language: str = "syn",
) -> SegmentedCorpus:
    """Generate a deterministic fusional-looking corpus.

    Each word is prefix+stem+suffix with parts drawn under Zipf-like
    weights (weight proportional to 1/rank in the given inventory order)
    and gold boundaries at the two junctions. Duplicate surfaces aggregate
    their counts; if two different decompositions collide on one surface,
    the first-sampled decomposition provides the gold boundaries.
    """
    prefixes, stems, suffixes = inventory
    for name, forms in (("prefixes", prefixes), ("stems", stems), ("suffixes", suffixes)):
        if not forms:
            raise ValueError(f"{name} inventory must be non-empty")
        if any(not f for f in forms):
            raise ValueError(f"{name} inventory contains an empty form")

    rng = random.Random(seed)
    weights = {
        "p": [1.0 / r for r in range(1, len(prefixes) + 1)],
        "s": [1.0 / r for r in range(1, len(stems) + 1)],
        "x": [1.0 / r for r in range(1, len(suffixes) + 1)],
    }
    segs: dict[str, SurfaceSegmentation] = {}
    counts: Counter[str] = Counter()
    for _ in range(n_words):
        p = rng.choices(prefixes, weights["p"])[0]
        s = rng.choices(stems, weights["s"])[0]
        x = rng.choices(suffixes, weights["x"])[0]
        surface = p + s + x
        if surface not in segs:
            segs[surface] = SurfaceSegmentation(
                surface, (len(p), len(p) + len(s))
            )
        counts[surface] += 1
    entries = tuple((segs[w], counts[w]) for w in segs)
    return SegmentedCorpus(entries, language)
