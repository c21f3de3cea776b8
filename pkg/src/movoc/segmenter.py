"""Boundary-constrained tokenizer training, encoding and serialization.

A tokenizer model bundles a vocabulary, learned merges, a morpheme lexicon
and an encoding policy. Hybrid-mode encoding runs two stages: a
leftmost-longest match over the morpheme lexicon fixes morpheme tokens,
then BPE merges fill the unmatched gaps. Constrained training rejects any
merge candidate that would straddle a gold morpheme boundary anywhere in
the corpus, so re-encoding a training word always recovers every gold
boundary.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

from .bpe import Encoding, MergeEngine, MergeTable, Vocabulary, bpe_split
from .corpus import SegmentedCorpus
from .errors import ModelLoadError
from .pretok import NormalizationPolicy, NormalizedText, normalize, pretokenize
from .vocab import SPECIAL_TOKENS

MODEL_FORMAT_VERSION = 1

MODES = ("plain_bpe", "movoc")
FALLBACKS = ("unk", "char_passthrough")

UNK, PAD, BOS, EOS = SPECIAL_TOKENS


@dataclass(frozen=True)
class Specials:
    unk: int
    pad: int
    bos: int
    eos: int


class _LexiconTrie:
    """Prefix tree over lexicon entries for longest-match scanning."""

    __slots__ = ("root",)

    def __init__(self, entries: Iterable[str]):
        self.root: dict = {}
        for entry in entries:
            node = self.root
            for ch in entry:
                node = node.setdefault(ch, {})
            node[""] = entry

    def longest_match(self, word: str, start: int) -> str | None:
        node = self.root
        found = None
        for i in range(start, len(word)):
            node = node.get(word[i])
            if node is None:
                break
            if "" in node:
                found = node[""]
        return found


@dataclass
class TokenizerModel:
    """Immutable-by-convention tokenizer: vocabulary + merges + lexicon.

    mode=movoc enables the two-stage lexicon+BPE encoder; mode=plain_bpe
    encodes with merges alone. fallback=unk replaces unknown material with
    the UNK token (spans preserved); fallback=char_passthrough keeps the
    character text but assigns it the UNK id.
    """

    vocabulary: Vocabulary
    merges: MergeTable
    lexicon: frozenset[str]
    mode: str
    fallback: str = "unk"
    specials: Specials = Specials(0, 1, 2, 3)
    metadata: dict = field(default_factory=dict)
    _trie: _LexiconTrie | None = field(
        default=None, repr=False, compare=False
    )

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.fallback not in FALLBACKS:
            raise ValueError(
                f"fallback must be one of {FALLBACKS}, got {self.fallback!r}"
            )
        for left, right in self.merges:
            if left + right not in self.vocabulary:
                raise ValueError(
                    f"merge output {left + right!r} missing from vocabulary"
                )
        missing = [t for t in self.lexicon if t not in self.vocabulary]
        if missing:
            raise ValueError(f"lexicon entries missing from vocabulary: {missing}")

    def lexicon_trie(self) -> _LexiconTrie:
        if self._trie is None:
            self._trie = _LexiconTrie(self.lexicon)
        return self._trie


def build_model(
    vocabulary: Vocabulary,
    merges: MergeTable,
    *,
    mode: str,
    lexicon: Iterable[str] = (),
    fallback: str = "unk",
    metadata: dict | None = None,
) -> TokenizerModel:
    """Assemble a model, prepending special tokens when absent.

    When the vocabulary lacks the special tokens, a fresh one is built
    with specials first and the given entries after (ids shift by the
    number of specials). Lexicon entries missing from the vocabulary are
    appended with provenance=morpheme.
    """
    if any(tok not in vocabulary for tok in SPECIAL_TOKENS):
        rebuilt = Vocabulary()
        for tok in SPECIAL_TOKENS:
            rebuilt.add(tok, "special")
        for entry in vocabulary:
            rebuilt.add(entry.token, entry.provenance, entry.language)
        vocabulary = rebuilt
    lexicon = frozenset(lexicon)
    for entry in sorted(lexicon):
        vocabulary.add(entry, "morpheme")
    specials = Specials(*(vocabulary.id_of(tok) for tok in SPECIAL_TOKENS))
    return TokenizerModel(
        vocabulary=vocabulary,
        merges=merges,
        lexicon=lexicon,
        mode=mode,
        fallback=fallback,
        specials=specials,
        metadata=dict(metadata or {}),
    )


def train_constrained(
    corpus: SegmentedCorpus,
    seed_vocab: Vocabulary | None = None,
    n_merges: int = 0,
    *,
    lexicon: Iterable[str] | None = None,
    fallback: str = "unk",
    metadata: dict | None = None,
) -> TokenizerModel:
    """Train merges that never cross gold morpheme boundaries.

    Pair counting matches plain BPE training except that an occurrence
    whose junction sits on a gold boundary contributes nothing, and a pair
    stays ineligible while any such occurrence exists in the corpus. Words
    with an empty boundary set impose no constraint. Training stops early
    when no eligible pair occurs at least twice; the actual merge count is
    recorded in the model metadata.

    The lexicon defaults to the provenance=morpheme tokens of seed_vocab;
    pass an explicit iterable to widen it (entries are added to the
    vocabulary if needed).
    """
    if n_merges < 0:
        raise ValueError(f"n_merges must be >= 0, got {n_merges}")
    engine = MergeEngine(
        (seg.surface, count, frozenset(seg.boundaries))
        for seg, count in corpus.entries
    )
    learned = engine.run(n_merges)

    vocabulary = Vocabulary()
    for tok in SPECIAL_TOKENS:
        vocabulary.add(tok, "special")
    alphabet = sorted({ch for seg, _ in corpus.entries for ch in seg.surface})
    for ch in alphabet:
        vocabulary.add(ch, "seed", corpus.language)
    if seed_vocab is not None:
        for entry in seed_vocab:
            vocabulary.add(entry.token, entry.provenance, entry.language)
    merges = MergeTable()
    for left, right in learned:
        merges.add(left, right)
        vocabulary.add(left + right, "bpe", corpus.language)

    if lexicon is None:
        lexicon = {e.token for e in vocabulary if e.provenance == "morpheme"}
    meta = dict(metadata or {})
    meta.update(
        {
            "merges_requested": n_merges,
            "merges_learned": len(learned),
            "boundary_rule": "junction",
            "boundary_certified": True,
        }
    )
    return build_model(
        vocabulary,
        merges,
        mode="movoc",
        lexicon=lexicon,
        fallback=fallback,
        metadata=meta,
    )


def _resolve(model: TokenizerModel, tokens, ids, spans) -> Encoding:
    """Apply the fallback policy to any token the vocabulary lacks."""
    out_tokens, out_ids = [], []
    for token, token_id in zip(tokens, ids):
        if token_id >= 0:
            out_tokens.append(token)
            out_ids.append(token_id)
        elif model.fallback == "char_passthrough":
            out_tokens.append(token)
            out_ids.append(model.specials.unk)
        else:
            out_tokens.append(UNK)
            out_ids.append(model.specials.unk)
    return Encoding(tuple(out_tokens), tuple(out_ids), tuple(spans))


def encode(model: TokenizerModel, word: str) -> Encoding:
    """Encode one whitespace-free word.

    movoc mode: lexicon entries are matched leftmost-longest and emitted
    atomically; the gaps in between are BPE-encoded. plain_bpe mode skips
    the lexicon stage. Unknown characters follow the fallback policy.
    """
    if not word or any(ch.isspace() for ch in word):
        raise ValueError(f"word {word!r} is empty or contains whitespace")

    tokens: list[str] = []
    ids: list[int] = []
    spans: list[tuple[int, int]] = []

    def add_gap(gap_start: int, gap_end: int) -> None:
        segment = word[gap_start:gap_end]
        syms, ends = bpe_split(segment, model.merges)
        pos = gap_start
        for sym, end in zip(syms, ends):
            token_id = model.vocabulary.id_of(sym)
            tokens.append(sym)
            ids.append(-1 if token_id is None else token_id)
            spans.append((pos, gap_start + end))
            pos = gap_start + end

    if model.mode == "movoc" and model.lexicon:
        trie = model.lexicon_trie()
        i = 0
        gap_start = 0
        while i < len(word):
            match = trie.longest_match(word, i)
            if match is None:
                i += 1
                continue
            if gap_start < i:
                add_gap(gap_start, i)
            tokens.append(match)
            ids.append(model.vocabulary.id_of(match))
            spans.append((i, i + len(match)))
            i += len(match)
            gap_start = i
        if gap_start < len(word):
            add_gap(gap_start, len(word))
    else:
        add_gap(0, len(word))
    return _resolve(model, tokens, ids, spans)


def encode_pretoken_atomic(model: TokenizerModel, text: str) -> Encoding:
    """Map a punctuation/number/other pre-token to a single token, falling
    back on the whole text when it is not in the vocabulary."""
    token_id = model.vocabulary.id_of(text)
    if token_id is None:
        return _resolve(model, [text], [-1], [(0, len(text))])
    return Encoding((text,), (token_id,), ((0, len(text)),))


def encode_text(
    model: TokenizerModel,
    text: NormalizedText | str,
    policy: NormalizationPolicy | None = None,
) -> list[Encoding]:
    """Pre-tokenize text and encode every pre-token.

    Raw strings are normalized first. Word pre-tokens go through
    :func:`encode`; punctuation, number and other pre-tokens each map to a
    single token.
    """
    if isinstance(text, str):
        text = normalize(text, policy)
    encodings = []
    for pretoken in pretokenize(text, policy):
        if pretoken.kind == "word":
            encodings.append(encode(model, pretoken.text))
        else:
            encodings.append(encode_pretoken_atomic(model, pretoken.text))
    return encodings


def decode(model: TokenizerModel, token_ids: Iterable[int]) -> str:
    """Concatenate the token strings for the given ids."""
    pieces = []
    for token_id in token_ids:
        if not 0 <= token_id < len(model.vocabulary):
            raise ValueError(
                f"token id {token_id} out of range 0..{len(model.vocabulary) - 1}"
            )
        pieces.append(model.vocabulary.token_of(token_id))
    return "".join(pieces)


def decode_encodings(model: TokenizerModel, encodings: Sequence[Encoding]) -> str:
    """Decode per-pre-token encodings, one space between pre-tokens."""
    return " ".join(decode(model, enc.token_ids) for enc in encodings)


def save_model(model: TokenizerModel, sink: IO[str] | str) -> None:
    """Write the model as a single versioned JSON document (UTF-8, NFC)."""
    doc = {
        "version": MODEL_FORMAT_VERSION,
        "mode": model.mode,
        "fallback": model.fallback,
        "specials": {
            "unk": model.specials.unk,
            "pad": model.specials.pad,
            "bos": model.specials.bos,
            "eos": model.specials.eos,
        },
        "vocab": [
            {
                "token": e.token,
                "id": e.id,
                "provenance": e.provenance,
                "lang": e.language,
            }
            for e in model.vocabulary
        ],
        "merges": [[left, right] for left, right in model.merges],
        "lexicon": sorted(model.lexicon),
        "metadata": model.metadata,
    }
    if isinstance(sink, str):
        with open(sink, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, ensure_ascii=False, indent=1)
            fh.write("\n")
    else:
        json.dump(doc, sink, ensure_ascii=False, indent=1)
        sink.write("\n")


def _require(doc: dict, key: str, kind: type) -> object:
    if key not in doc:
        raise ModelLoadError(f"model document is missing field {key!r}")
    value = doc[key]
    if not isinstance(value, kind):
        raise ModelLoadError(
            f"model field {key!r} must be {kind.__name__}, got {type(value).__name__}"
        )
    return value


def load_model(source: IO[str] | str) -> TokenizerModel:
    """Load a model document written by :func:`save_model`.

    Version mismatches, schema violations and duplicate tokens raise
    :class:`ModelLoadError` naming the offending field.
    """
    try:
        if isinstance(source, str):
            with open(source, encoding="utf-8") as fh:
                doc = json.load(fh)
        else:
            doc = json.load(source)
    except json.JSONDecodeError as exc:
        raise ModelLoadError(f"model document is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelLoadError("model document must be a JSON object")

    version = _require(doc, "version", int)
    if version != MODEL_FORMAT_VERSION:
        raise ModelLoadError(
            f"unsupported model version {version}; supported versions: "
            f"{MODEL_FORMAT_VERSION}"
        )
    mode = _require(doc, "mode", str)
    fallback = _require(doc, "fallback", str)
    if mode not in MODES:
        raise ModelLoadError(f"model field 'mode': unknown mode {mode!r}")
    if fallback not in FALLBACKS:
        raise ModelLoadError(f"model field 'fallback': unknown policy {fallback!r}")

    vocab_rows = _require(doc, "vocab", list)
    vocabulary = Vocabulary()
    for row in vocab_rows:
        if not isinstance(row, dict):
            raise ModelLoadError("model field 'vocab': entries must be objects")
        token = row.get("token")
        if not isinstance(token, str) or not token:
            raise ModelLoadError("model field 'vocab': token must be a non-empty string")
        if unicodedata.normalize("NFC", token) != token:
            raise ModelLoadError(f"model field 'vocab': token {token!r} is not NFC")
        if token in vocabulary:
            raise ModelLoadError(f"model field 'vocab': duplicate token {token!r}")
        try:
            assigned = vocabulary.add(token, row.get("provenance"), row.get("lang"))
        except ValueError as exc:
            raise ModelLoadError(f"model field 'vocab': {exc}") from exc
        if row.get("id") != assigned:
            raise ModelLoadError(
                f"model field 'vocab': token {token!r} has id {row.get('id')}, "
                f"expected dense id {assigned}"
            )

    merges = MergeTable()
    for rule in _require(doc, "merges", list):
        if not (isinstance(rule, list) and len(rule) == 2):
            raise ModelLoadError("model field 'merges': rules must be [left, right]")
        try:
            merges.add(rule[0], rule[1])
        except ValueError as exc:
            raise ModelLoadError(f"model field 'merges': {exc}") from exc

    lexicon = _require(doc, "lexicon", list)
    specials_doc = _require(doc, "specials", dict)
    ids = {}
    for name in ("unk", "pad", "bos", "eos"):
        value = specials_doc.get(name)
        if not isinstance(value, int) or not 0 <= value < len(vocabulary):
            raise ModelLoadError(f"model field 'specials.{name}' is out of range")
        ids[name] = value
    metadata = _require(doc, "metadata", dict)

    try:
        return TokenizerModel(
            vocabulary=vocabulary,
            merges=merges,
            lexicon=frozenset(lexicon),
            mode=mode,
            fallback=fallback,
            specials=Specials(**ids),
            metadata=metadata,
        )
    except ValueError as exc:
        raise ModelLoadError(str(exc)) from exc
