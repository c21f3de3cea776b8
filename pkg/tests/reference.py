"""Brute-force reference implementations used as oracles in tests.

Deliberately independent of the package internals: every training step
recounts all pair statistics from scratch over the full corpus state, with
no incremental bookkeeping, so agreement with the incremental trainer is
meaningful.
"""

from collections import Counter


def reference_merges(
    counts: dict[str, int],
    max_merges: int,
    boundaries: dict[str, frozenset[int]] | None = None,
) -> list[tuple[str, str]]:
    """Greedy merge sequence computed by full recounts.

    Selection: highest weighted count of occurrences not sitting on a
    boundary junction, ties to the code-point-smaller pair; a pair with any
    boundary-junction occurrence anywhere is ineligible; counts below 2
    stop training. Application merges left to right, skipping boundary
    junctions.
    """
    boundaries = boundaries or {}
    state = [
        (list(word), count, boundaries.get(word, frozenset()))
        for word, count in sorted(counts.items())
    ]
    merges: list[tuple[str, str]] = []
    while len(merges) < max_merges:
        legal: Counter = Counter()
        banned: set[tuple[str, str]] = set()
        for syms, count, blocked in state:
            pos = 0
            for i in range(len(syms) - 1):
                pos += len(syms[i])
                pair = (syms[i], syms[i + 1])
                if pos in blocked:
                    banned.add(pair)
                else:
                    legal[pair] += count
        best = None
        best_count = 0
        for pair, count in sorted(legal.items()):
            if count < 2 or pair in banned:
                continue
            if count > best_count:
                best, best_count = pair, count
        if best is None:
            break
        merges.append(best)
        left, right = best
        for entry_index, (syms, count, blocked) in enumerate(state):
            new_syms = []
            pos = 0
            i = 0
            while i < len(syms):
                junction = pos + len(syms[i])
                if (
                    i + 1 < len(syms)
                    and syms[i] == left
                    and syms[i + 1] == right
                    and junction not in blocked
                ):
                    new_syms.append(left + right)
                    pos = junction + len(syms[i + 1])
                    i += 2
                else:
                    new_syms.append(syms[i])
                    pos = junction
                    i += 1
            state[entry_index] = (new_syms, count, blocked)
    return merges


def reference_segment(word: str, merge_sequence: list[tuple[str, str]]) -> list[str]:
    """Segment a word by replaying the merge rules in learned order."""
    syms = list(word)
    for left, right in merge_sequence:
        out = []
        i = 0
        while i < len(syms):
            if i + 1 < len(syms) and syms[i] == left and syms[i + 1] == right:
                out.append(left + right)
                i += 2
            else:
                out.append(syms[i])
                i += 1
        syms = out
    return syms
