"""Greedy byte-pair encoding.

Each round merges the pair whose full left-to-right replacement shortens the
current text the most.  Ties go to the pair whose first occurrence in the
current text is leftmost; since every index starts exactly one pair this is a
total order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .text import (MergeRule, MergeSequence, Pair, PairIndex, Text,
                   pair_stats, replace_all)


class NoPairError(ValueError):
    """Raised when a text is too short to contain any pair."""


@dataclass(frozen=True)
class BpeStep:
    pair: Pair
    utility: int
    length: int


@dataclass(frozen=True)
class BpeTrace:
    steps: tuple[BpeStep, ...] = ()
    truncated: bool = False

    @property
    def total_utility(self) -> int:
        return sum(s.utility for s in self.steps)


def best_pairs(text: Text) -> list[Pair]:
    """All pairs of maximal replaceable count, ordered by first occurrence."""
    if len(text) < 2:
        return []
    rc, _, first = pair_stats(text.symbols)
    top = max(rc.values())
    return sorted((p for p, c in rc.items() if c == top), key=first.__getitem__)


def choose_pair(text: Text) -> Pair:
    """The pair BPE merges next on ``text``."""
    if len(text) < 2:
        raise NoPairError("text has fewer than two symbols")
    return best_pairs(text)[0]


class _Trainer:
    def __init__(self, symbols):
        self.index = PairIndex(symbols)
        self.rc_cache: dict = {}
        self.first_cache: dict = {}

    def _rc(self, pair):
        if pair[0] != pair[1]:
            return len(self.index.occ[pair])
        c = self.rc_cache.get(pair)
        if c is None:
            c = self.rc_cache[pair] = self.index.replaceable(pair)
        return c

    def _first(self, pair):
        f = self.first_cache.get(pair)
        if f is None:
            f = self.first_cache[pair] = min(self.index.occ[pair])
        return f

    def select(self) -> Pair:
        occ = self.index.occ
        for p in self.index.touched:
            self.rc_cache.pop(p, None)
            self.first_cache.pop(p, None)
        self.index.touched.clear()
        best, tied = 0, []
        for p, pos in occ.items():
            c = len(pos) if p[0] != p[1] else self._rc(p)
            if c > best:
                best, tied = c, [p]
            elif c == best:
                tied.append(p)
        return min(tied, key=self._first)

    def merge(self, pair, out) -> int:
        return self.index.merge(pair, out)


def bpe_train(text: Text, k: int) -> tuple[MergeSequence, BpeTrace]:
    """Run ``k`` greedy full merges; stop early once fewer than two symbols remain.

    New symbols get ids ``len(text.alphabet)``, ``len(text.alphabet) + 1``, ...
    in merge order.  The trace's ``truncated`` flag is set when the text
    collapsed before ``k`` merges were made.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    trainer = _Trainer(text.symbols)
    base = len(text.alphabet)
    rules, steps = [], []
    for i in range(k):
        if trainer.index.length < 2:
            return MergeSequence(tuple(rules)), BpeTrace(tuple(steps), truncated=True)
        pair = trainer.select()
        rule = MergeRule(pair[0], pair[1], base + i)
        u = trainer.merge(pair, rule.out)
        rules.append(rule)
        steps.append(BpeStep(pair, u, trainer.index.length))
    return MergeSequence(tuple(rules)), BpeTrace(tuple(steps))


def bpe_utility(text: Text, k: int) -> int:
    return bpe_train(text, k)[1].total_utility


def is_greedy_run(text: Text, seq: MergeSequence) -> bool:
    """Whether ``seq`` is a BPE run on ``text`` under *some* tie-break.

    Every rule must merge a pair of maximal replaceable count on the current
    text; which of the tied maximisers gets picked is left open.
    """
    s = text.symbols
    for rule in seq:
        if len(s) < 2:
            return False
        rc, _, _ = pair_stats(s)
        if rc.get(rule.pair, 0) != max(rc.values()):
            return False
        s = replace_all(s, rule.left, rule.right, rule.out)
    return True
