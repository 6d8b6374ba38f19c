"""Exact solvers for the optimal merge sequence and optimal pair encoding problems.

Both are exponential and meant as ground truth on small instances.

``oms_opt`` searches full merge sequences depth first, memoising on the text
with merge-created symbols relabelled by first appearance, and prunes a child
when its step utility plus the optimal packing of the child text cannot beat
the best sibling.

``ope_opt`` uses the fact that the text left by a partial merge sequence is a
segmentation of the input into pieces, each an input symbol or the string
spelled by one created symbol, and that any segmentation over such a
vocabulary can be realised by partial merges.  It therefore enumerates
vocabularies of at most k substrings closed under pairwise construction and
scores each by a shortest-segmentation dynamic program.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from typing import Optional

from .bounds import pk_value
from .text import (AnySequence, MergeRule, MergeSequence, PartialSequence,
                   PartialStep, Text, apply, pair_stats, replace_all,
                   replace_at)


class BudgetExceeded(ValueError):
    """The instance is larger than the search budget admits."""


@dataclass(frozen=True)
class SearchBudget:
    max_len: int = 40
    max_k: int = 6
    max_nodes: int = 2_000_000
    time_limit: float = 600.0

    def __post_init__(self):
        if min(self.max_len, self.max_k, self.max_nodes) <= 0 or self.time_limit <= 0:
            raise ValueError("budget fields must be positive")

    @classmethod
    def from_env(cls, **kw) -> "SearchBudget":
        nodes = os.environ.get("PAIRENC_BUDGET_NODES")
        if nodes:
            kw["max_nodes"] = int(nodes)
        return cls(**kw)


@dataclass(frozen=True)
class SearchResult:
    value: int
    witness: AnySequence
    exact: bool = True
    nodes: int = 0

    def __iter__(self):
        # allows ``value, witness = oms_opt(...)``
        return iter((self.value, self.witness))


class _Clock:
    def __init__(self, budget: SearchBudget):
        self.budget = budget
        self.nodes = 0
        self.deadline = time.monotonic() + budget.time_limit
        self.exhausted = False

    def tick(self) -> bool:
        self.nodes += 1
        if self.nodes > self.budget.max_nodes or (
                self.nodes % 1024 == 0 and time.monotonic() > self.deadline):
            self.exhausted = True
        return not self.exhausted


def _check_size(text: Text, k: int, budget: SearchBudget):
    if k < 0:
        raise ValueError("k must be non-negative")
    if len(text) > budget.max_len or k > budget.max_k:
        raise BudgetExceeded(
            f"instance |s|={len(text)}, k={k} exceeds budget "
            f"(max_len={budget.max_len}, max_k={budget.max_k})")


# ---------------------------------------------------------------------------
# optimal merge sequence


def _canonical(seq: tuple, base: int) -> tuple:
    relabel: dict = {}
    out = []
    for x in seq:
        if x >= base:
            x = relabel.setdefault(x, base + len(relabel))
        out.append(x)
    return tuple(out)


def oms_opt(text: Text, k: int, budget: SearchBudget | None = None) -> SearchResult:
    """Maximum utility over full merge sequences of length at most ``k``.

    The witness is the lexicographically smallest optimal sequence, comparing
    rules by ``(left, right)`` with new symbols numbered in merge order.  If
    the node or time budget runs out the result has ``exact=False`` and its
    value is only a lower bound.
    """
    budget = budget or SearchBudget.from_env()
    _check_size(text, k, budget)
    base = len(text.alphabet)
    clock = _Clock(budget)
    memo: dict = {}

    def value(s: tuple, r: int, fresh: int) -> int:
        if r == 0 or len(s) < 2:
            return 0
        key = (_canonical(s, base), r)
        hit = memo.get(key)
        if hit is not None:
            return hit
        rc, _, _ = pair_stats(s)
        if r == 1:
            memo[key] = best = max(rc.values())
            return best
        best = 0
        bound = pk_value(s, r)
        for pair in sorted(rc, key=lambda p: -rc[p]):
            if best >= bound or not clock.tick():
                break
            child = replace_all(s, pair[0], pair[1], fresh)
            gain = rc[pair]
            if gain + pk_value(child, r - 1) <= best:
                continue
            best = max(best, gain + value(child, r - 1, fresh + 1))
        if not clock.exhausted:
            memo[key] = best
        return best

    total = value(text.symbols, k, base)

    # rebuild the lexicographically smallest witness from memoised values
    rules = []
    s, r, need = text.symbols, k, total
    fresh = base
    while need > 0 and r > 0:
        rc, _, _ = pair_stats(s)
        for pair in sorted(rc):
            child = replace_all(s, pair[0], pair[1], fresh)
            if rc[pair] + value(child, r - 1, fresh + 1) >= need:
                rules.append(MergeRule(pair[0], pair[1], fresh))
                need -= rc[pair]
                s, r, fresh = child, r - 1, fresh + 1
                break
        else:  # only reachable after budget exhaustion
            break
    witness = MergeSequence(tuple(rules))
    achieved = len(text) - len(apply(text, witness))
    return SearchResult(achieved if clock.exhausted else total, witness,
                        not clock.exhausted, clock.nodes)


# ---------------------------------------------------------------------------
# optimal pair encoding


def _substrings(s: tuple) -> set:
    return {s[i:j] for i in range(len(s)) for j in range(i + 2, len(s) + 1)}


def _min_segmentation(s: tuple, vocab) -> tuple[int, list]:
    """Fewest pieces covering ``s`` with single symbols and ``vocab`` strings.

    Returns the count and the pieces as ``(start, string)``; ties prefer the
    longest piece ending at each position.
    """
    n = len(s)
    by_len = sorted({len(w) for w in vocab}, reverse=True)
    cost = [0] * (n + 1)
    back = [1] * (n + 1)
    for i in range(1, n + 1):
        cost[i] = cost[i - 1] + 1
        back[i] = 1
        for L in by_len:
            if L <= i and cost[i - L] + 1 < cost[i] and s[i - L:i] in vocab:
                cost[i] = cost[i - L] + 1
                back[i] = L
    pieces = []
    i = n
    while i > 0:
        L = back[i]
        pieces.append((i - L, s[i - L:i]))
        i -= L
    pieces.reverse()
    return cost[n], pieces


def _split(w: tuple, avail) -> Optional[int]:
    for m in range(1, len(w)):
        u, v = w[:m], w[m:]
        if (len(u) == 1 or u in avail) and (len(v) == 1 or v in avail):
            return m
    return None


def _vocab_witness(text: Text, vocab) -> PartialSequence:
    """Partial merge sequence realising the shortest segmentation over ``vocab``."""
    s = text.symbols
    order = sorted(vocab, key=lambda w: (len(w), w))
    rule_of: dict = {}
    split: dict = {}
    rules = []
    base = len(text.alphabet)
    for idx, w in enumerate(order):
        m = split[w] = _split(w, rule_of)
        left = w[0] if m == 1 else rule_of[w[:m]].out
        right = w[-1] if len(w) - m == 1 else rule_of[w[m:]].out
        rule_of[w] = MergeRule(left, right, base + idx)
        rules.append(rule_of[w])

    _, pieces = _min_segmentation(s, set(vocab))
    starts: dict = {r.out: [] for r in rules}

    def expand(w, start):
        if len(w) < 2:
            return
        rule = rule_of[w]
        starts[rule.out].append(start)
        m = split[w]
        expand(w[:m], start)
        expand(w[m:], start + m)

    for start, w in pieces:
        expand(w, start)

    cur_start = list(range(len(s)))  # original start of each current symbol
    cur = list(s)
    steps = []
    for rule in rules:
        where = {st: j for j, st in enumerate(cur_start)}
        pos = sorted(where[st] for st in starts[rule.out])
        steps.append(PartialStep(rule, tuple(pos)))
        cur = list(replace_at(cur, pos, rule.out))
        drop = {p + 1 for p in pos}
        cur_start = [st for j, st in enumerate(cur_start) if j not in drop]
    return PartialSequence(tuple(steps))


def ope_opt(text: Text, k: int, budget: SearchBudget | None = None) -> SearchResult:
    """Maximum utility over partial merge sequences of length at most ``k``.

    Exhausts vocabularies of at most ``k`` created strings; stops early once
    a vocabulary reaches the optimal k-packing size, which no encoding can
    exceed.  Budget exhaustion yields ``exact=False`` (value is a lower bound).
    """
    budget = budget or SearchBudget.from_env()
    _check_size(text, k, budget)
    s = text.symbols
    clock = _Clock(budget)
    ceiling = pk_value(s, k)
    subs = _substrings(s)
    pairs = sorted(w for w in subs if len(w) == 2)
    best_val, best_vocab = 0, frozenset()
    seen = set()
    stack = [frozenset()]
    while stack:
        vocab = stack.pop()
        children = []
        if len(vocab) < k:
            cands = set(w for w in pairs if w not in vocab)
            parts = [(x,) for x in set(s)] + list(vocab)
            for u in vocab:
                for v in parts:
                    for w in (u + v, v + u):
                        if w in subs and w not in vocab:
                            cands.add(w)
            for w in sorted(cands, reverse=True):
                child = vocab | {w}
                if child not in seen:
                    seen.add(child)
                    children.append(child)
        if not children:
            val = len(s) - _min_segmentation(s, vocab)[0]
            if val > best_val or (val == best_val and sorted(vocab) < sorted(best_vocab)):
                best_val, best_vocab = val, vocab
            if best_val >= ceiling:
                break
        if not clock.tick():
            break
        stack.extend(children)
    witness = _vocab_witness(text, best_vocab)
    return SearchResult(best_val, witness, not clock.exhausted, clock.nodes)


def ope_opt_subsets(text: Text, k: int, max_len: int = 10) -> int:
    """OPE optimum by branching over every pair and every non-overlapping
    subset of its occurrences.  Only for tiny inputs; used as an oracle."""
    if len(text) > max_len:
        raise BudgetExceeded("ope_opt_subsets is for tiny texts only")
    base = len(text.alphabet)
    memo: dict = {}

    def subsets(pos):
        # all non-empty subsets of pos with pairwise distance >= 2
        out = []

        def rec(j, chosen):
            if j == len(pos):
                if chosen:
                    out.append(tuple(chosen))
                return
            rec(j + 1, chosen)
            if not chosen or pos[j] - chosen[-1] >= 2:
                rec(j + 1, chosen + [pos[j]])
        rec(0, [])
        return out

    def best(s, r, fresh):
        if r == 0 or len(s) < 2:
            return 0
        key = (_canonical(s, base), r)
        if key in memo:
            return memo[key]
        res = 0
        for pair in set(zip(s, s[1:])):
            pos = [i for i in range(len(s) - 1) if (s[i], s[i + 1]) == pair]
            for sub in subsets(pos):
                res = max(res, len(sub) + best(replace_at(s, sub, fresh), r - 1, fresh + 1))
        memo[key] = res
        return res

    return best(text.symbols, k, base)


def replay(text: Text, seq: AnySequence) -> int:
    """Utility of a hand-specified (partial) merge sequence, validating it."""
    return len(text) - len(apply(text, seq))

