"""EvenOdd: a one-shot 0.5-approximation for optimal pair encoding.

Take the k most frequent pairs of the input, collect every index where one of
them starts, drop even-ranked indices that touch a neighbour, and partially
merge what survives.  Only input symbols are ever merged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .text import (MergeRule, Pair, PartialSequence, PartialStep, Text,
                   pair_stats)


@dataclass(frozen=True)
class FrequentPairSet:
    pairs: tuple[Pair, ...]
    indices: tuple[int, ...]

    @property
    def total(self) -> int:
        return len(self.indices)


def _ranked_pairs(symbols) -> list[Pair]:
    _, freq, first = pair_stats(symbols)
    return sorted(freq, key=lambda p: (-freq[p], first[p]))


def top_k_pairs(text: Text, k: int) -> FrequentPairSet:
    """The ``k`` most frequent pairs (overlaps counted) and all their start indices.

    Ties are broken by earliest first occurrence.  Fewer than ``k`` pairs are
    returned when the text has fewer distinct pairs.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    s = text.symbols
    pairs = tuple(_ranked_pairs(s)[:k])
    chosen = set(pairs)
    indices = tuple(i for i in range(len(s) - 1) if (s[i], s[i + 1]) in chosen)
    return FrequentPairSet(pairs, indices)


def sparsify(indices: Sequence[int]) -> list[int]:
    """Drop every even-ranked index adjacent to its odd-ranked neighbours."""
    keep = []
    n = len(indices)
    for j, x in enumerate(indices):
        if j % 2 == 1:  # rank j+1 is even
            if x == indices[j - 1] + 1 or (j + 1 < n and x == indices[j + 1] - 1):
                continue
        keep.append(x)
    return keep


def greedy_sparsify(indices: Sequence[int]) -> list[int]:
    """Largest subset with no two indices at distance one (earliest-first greedy)."""
    keep: list[int] = []
    for x in indices:
        if not keep or x - keep[-1] != 1:
            keep.append(x)
    return keep


def evenodd(text: Text, k: int, greedy: bool = False) -> tuple[PartialSequence, int]:
    """Partial merge sequence of at most ``k`` steps and its utility.

    One step per frequent pair, in frequency-rank order.  Step positions are
    expressed in the coordinates of the text current at that step.  With
    ``greedy=True`` the maximum non-adjacent subset is kept instead of the
    even/odd rule.
    """
    fps = top_k_pairs(text, k)
    s = text.symbols
    kept = (greedy_sparsify if greedy else sparsify)(fps.indices)
    by_pair: dict[Pair, list[int]] = {p: [] for p in fps.pairs}
    for i in kept:
        by_pair[(s[i], s[i + 1])].append(i)

    base = len(text.alphabet)
    done: list[int] = []  # original indices already merged, sorted
    steps = []
    for j, pair in enumerate(fps.pairs):
        orig = by_pair[pair]
        # each earlier merge left of i shifts it one place to the left
        shifted, m = [], 0
        for i in orig:
            while m < len(done) and done[m] < i:
                m += 1
            shifted.append(i - m)
        steps.append(PartialStep(MergeRule(pair[0], pair[1], base + j), tuple(shifted)))
        done = sorted(done + orig)
    return PartialSequence(tuple(steps)), len(kept)
