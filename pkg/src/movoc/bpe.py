"""Byte-pair-encoding training and encoding over scalar characters.

Training greedily merges the most frequent adjacent symbol pair, smallest
pair first under code-point order on ties, and stops early once the best
pair occurs fewer than 2 times. Pairs never cross pre-token boundaries and
no end-of-word marker is used. The same engine drives boundary-constrained
training: a pair occurrence whose junction offset is a gold morpheme
boundary contributes nothing, and a pair is not selectable while any such
blocked occurrence exists anywhere in the corpus (so no learned merge can
ever straddle a gold boundary, in training or at re-encoding time).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .corpus import WordCounts
from .errors import ConfigError

PROVENANCES = ("seed", "bpe", "morpheme", "special")


@dataclass(frozen=True)
class VocabEntry:
    token: str
    id: int
    provenance: str
    language: str | None = None


class Vocabulary:
    """Token strings with dense ids. First insertion of a string wins;
    re-adding an existing token returns its id unchanged."""

    def __init__(self, entries: Iterable[VocabEntry] = ()):
        self._entries: list[VocabEntry] = []
        self._by_token: dict[str, int] = {}
        for e in entries:
            got = self.add(e.token, e.provenance, e.language)
            if got != e.id:
                raise ValueError(
                    f"entry {e.token!r} carries id {e.id} but dense order gives {got}"
                )

    def add(self, token: str, provenance: str, language: str | None = None) -> int:
        if not token:
            raise ValueError("cannot add an empty token")
        if provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {provenance!r}")
        existing = self._by_token.get(token)
        if existing is not None:
            return existing
        idx = len(self._entries)
        self._entries.append(VocabEntry(token, idx, provenance, language))
        self._by_token[token] = idx
        return idx

    def id_of(self, token: str) -> int | None:
        return self._by_token.get(token)

    def token_of(self, idx: int) -> str:
        return self._entries[idx].token

    def entry_of(self, token: str) -> VocabEntry | None:
        idx = self._by_token.get(token)
        return None if idx is None else self._entries[idx]

    def token_strings(self) -> frozenset[str]:
        return frozenset(self._by_token)

    def __contains__(self, token: str) -> bool:
        return token in self._by_token

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[VocabEntry]:
        return iter(self._entries)


class MergeTable:
    """Ordered merge rules; rank equals list position."""

    def __init__(self, rules: Iterable[tuple[str, str]] = ()):
        self.rules: list[tuple[str, str]] = []
        self._ranks: dict[tuple[str, str], int] = {}
        for left, right in rules:
            self.add(left, right)

    def add(self, left: str, right: str) -> int:
        pair = (left, right)
        if pair in self._ranks:
            raise ValueError(f"duplicate merge rule {pair!r}")
        self.rules.append(pair)
        self._ranks[pair] = len(self.rules) - 1
        return self._ranks[pair]

    def rank_of(self, pair: tuple[str, str]) -> int | None:
        return self._ranks.get(pair)

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self) -> Iterator[tuple[str, str]]:
        return iter(self.rules)

    def __getitem__(self, rank: int) -> tuple[str, str]:
        return self.rules[rank]


@dataclass(frozen=True)
class Encoding:
    """Tokenized word: token texts, ids and the spans they tile.

    Spans are half-open scalar offsets covering 0..len(word) contiguously;
    the predicted boundary set is the interior span endpoints. An id of -1
    marks a token absent from the vocabulary (resolved by the tokenizer
    model's fallback policy, never emitted by it).
    """

    tokens: tuple[str, ...]
    token_ids: tuple[int, ...]
    spans: tuple[tuple[int, int], ...]

    def boundaries(self) -> frozenset[int]:
        return frozenset(end for _, end in self.spans[:-1])

    def length(self) -> int:
        return self.spans[-1][1] if self.spans else 0


def apply_merge(sequence: Sequence[str], rule: tuple[str, str]) -> list[str]:
    """Replace every adjacent (left, right) occurrence, left to right in a
    single non-overlapping pass."""
    left, right = rule
    out: list[str] = []
    i = 0
    while i < len(sequence):
        if i + 1 < len(sequence) and sequence[i] == left and sequence[i + 1] == right:
            out.append(left + right)
            i += 2
        else:
            out.append(sequence[i])
            i += 1
    return out


class _WordState:
    __slots__ = ("syms", "ends", "count", "blocked")

    def __init__(self, word: str, count: int, blocked: frozenset[int]):
        self.syms = list(word)
        self.ends = list(range(1, len(word) + 1))
        self.count = count
        self.blocked = blocked


class MergeEngine:
    """Incremental pair statistics over a weighted word list.

    Selection is deterministic: highest weighted count of unblocked
    occurrences, ties to the code-point-smaller pair; pairs with any
    currently blocked occurrence are ineligible; counts below 2 stop
    training.
    """

    def __init__(self, words: Iterable[tuple[str, int, frozenset[int]]]):
        self.states: list[_WordState] = []
        self.legal: dict[tuple[str, str], int] = {}
        self.blocked_weight: dict[tuple[str, str], int] = {}
        self.word_index: dict[tuple[str, str], set[int]] = {}
        for word, count, blocked in words:
            if count < 1:
                raise ValueError(f"word {word!r} has non-positive count {count}")
            state = _WordState(word, count, blocked)
            idx = len(self.states)
            self.states.append(state)
            self._account(idx, state, +1)

    def _account(self, idx: int, state: _WordState, sign: int) -> None:
        syms, ends = state.syms, state.ends
        for j in range(len(syms) - 1):
            pair = (syms[j], syms[j + 1])
            if ends[j] in state.blocked:
                bucket = self.blocked_weight
            else:
                bucket = self.legal
                if sign > 0:
                    self.word_index.setdefault(pair, set()).add(idx)
            new = bucket.get(pair, 0) + sign * state.count
            if new:
                bucket[pair] = new
            else:
                bucket.pop(pair, None)

    def best_pair(self) -> tuple[str, str] | None:
        best = None
        best_count = 0
        for pair, count in self.legal.items():
            if count < 2 or self.blocked_weight.get(pair, 0):
                continue
            if count > best_count or (count == best_count and pair < best):
                best, best_count = pair, count
        return best

    def apply(self, pair: tuple[str, str]) -> None:
        left, right = pair
        for idx in sorted(self.word_index.get(pair, ())):
            state = self.states[idx]
            self._account(idx, state, -1)
            syms, ends = state.syms, state.ends
            new_syms: list[str] = []
            new_ends: list[int] = []
            j = 0
            while j < len(syms):
                if (
                    j + 1 < len(syms)
                    and syms[j] == left
                    and syms[j + 1] == right
                    and ends[j] not in state.blocked
                ):
                    new_syms.append(left + right)
                    new_ends.append(ends[j + 1])
                    j += 2
                else:
                    new_syms.append(syms[j])
                    new_ends.append(ends[j])
                    j += 1
            state.syms, state.ends = new_syms, new_ends
            self._account(idx, state, +1)
        # every legal occurrence was merged away
        self.word_index.pop(pair, None)

    def run(self, max_merges: int) -> list[tuple[str, str]]:
        merges: list[tuple[str, str]] = []
        while len(merges) < max_merges:
            pair = self.best_pair()
            if pair is None:
                break
            merges.append(pair)
            self.apply(pair)
        return merges


def train_bpe(counts: WordCounts, target_size: int) -> tuple[Vocabulary, MergeTable]:
    """Learn a BPE vocabulary of at most target_size tokens.

    target_size covers seed characters plus merged tokens. Training stops
    early when no pair occurs at least twice; two merge paths producing the
    same string share one vocabulary entry.
    """
    words = sorted(counts.counts.items())
    for word, _ in words:
        if not word or any(ch.isspace() for ch in word):
            raise ValueError(f"word {word!r} is empty or contains whitespace")
    alphabet = sorted({ch for word, _ in words for ch in word})
    if target_size < len(alphabet):
        raise ConfigError(
            f"target_size {target_size} is smaller than the seed alphabet "
            f"({len(alphabet)} characters)"
        )

    vocab = Vocabulary()
    for ch in alphabet:
        vocab.add(ch, "seed", counts.language)
    merges = MergeTable()
    engine = MergeEngine((word, count, frozenset()) for word, count in words)
    while len(vocab) < target_size:
        pair = engine.best_pair()
        if pair is None:
            break
        merges.add(*pair)
        vocab.add(pair[0] + pair[1], "bpe", counts.language)
        engine.apply(pair)
    return vocab, merges


def bpe_split(word: str, merges: MergeTable) -> tuple[list[str], list[int]]:
    """Segment a word with learned merges: repeatedly apply the lowest-rank
    applicable rule (all occurrences, left to right) until none applies.
    Returns the symbols and their cumulative end offsets."""
    syms = list(word)
    ends = list(range(1, len(word) + 1))
    while len(syms) > 1:
        best_rank: int | None = None
        for j in range(len(syms) - 1):
            rank = merges.rank_of((syms[j], syms[j + 1]))
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank = rank
        if best_rank is None:
            break
        left, right = merges[best_rank]
        new_syms: list[str] = []
        new_ends: list[int] = []
        j = 0
        while j < len(syms):
            if j + 1 < len(syms) and syms[j] == left and syms[j + 1] == right:
                new_syms.append(left + right)
                new_ends.append(ends[j + 1])
                j += 2
            else:
                new_syms.append(syms[j])
                new_ends.append(ends[j])
                j += 1
        syms, ends = new_syms, new_ends
    return syms, ends


def encode_bpe(vocab: Vocabulary, merges: MergeTable, word: str) -> Encoding:
    """Encode one whitespace-free word with raw BPE.

    Tokens absent from the vocabulary (only ever unknown single characters)
    get id -1; the tokenizer model layer maps those through its fallback
    policy.
    """
    if not word or any(ch.isspace() for ch in word):
        raise ValueError(f"word {word!r} is empty or contains whitespace")
    syms, ends = bpe_split(word, merges)
    spans = []
    start = 0
    for end in ends:
        spans.append((start, end))
        start = end
    ids = tuple(vocab.id_of(s) if s in vocab else -1 for s in syms)
    return Encoding(tuple(syms), ids, tuple(spans))
