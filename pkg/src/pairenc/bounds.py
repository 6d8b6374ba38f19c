"""k-packings: upper bounds on the utility of any length-k pair encoding.

A pair packing is a set of start indices of equal, non-overlapping pairs of
the original text; a k-packing is a disjoint union of k of them.  The largest
k-packing bounds the utility of every (partial) merge sequence of length k,
and the total count of the k most frequent pairs bounds the packing.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .evenodd import top_k_pairs
from .text import AnySequence, MergeSequence, Pair, Text, occurrences, to_partial


@dataclass(frozen=True)
class PackingCertificate:
    k: int
    groups: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return sum(len(g) for g in self.groups)

    def indices(self) -> set[int]:
        return {i for g in self.groups for i in g}


class CertificateError(ValueError):
    pass


def check_certificate(text: Text, cert: PackingCertificate) -> None:
    """Raise :class:`CertificateError` unless ``cert`` is a valid k-packing of ``text``."""
    s = text.symbols
    nonempty = [g for g in cert.groups if g]
    if len(nonempty) > cert.k:
        raise CertificateError(f"{len(nonempty)} groups exceed k={cert.k}")
    seen: set[int] = set()
    for g in nonempty:
        if any(not 0 <= i < len(s) - 1 for i in g):
            raise CertificateError(f"group {g} has an index without a pair")
        pair = (s[g[0]], s[g[0] + 1])
        for a, b in zip(g, g[1:]):
            if b - a < 2:
                raise CertificateError(f"indices {a} and {b} overlap or are unsorted")
        for i in g:
            if (s[i], s[i + 1]) != pair:
                raise CertificateError(f"group {g} mixes different pairs")
            if i in seen:
                raise CertificateError(f"index {i} used by two groups")
            seen.add(i)


def _runs(pos: Sequence[int]) -> list[list[int]]:
    runs: list[list[int]] = []
    for i in pos:
        if runs and runs[-1][-1] == i - 1:
            runs[-1].append(i)
        else:
            runs.append([i])
    return runs


def gain_curve(text: Text, pair: Pair) -> list[int]:
    """``[g(1), g(2)]``: most indices of ``pair`` coverable by one / two packings.

    Occurrences of a pair ``xy`` with ``x != y`` never overlap, so one packing
    takes them all.  A pair ``xx`` overlaps itself inside runs of ``x``; one
    packing takes every other occurrence of each run, two take everything.
    """
    pos = occurrences(text.symbols, pair)
    if pair[0] != pair[1]:
        return [len(pos), len(pos)]
    return [sum((len(r) + 1) // 2 for r in _runs(pos)), len(pos)]


def _packings(symbols) -> list[tuple[int, int, int, tuple[int, ...]]]:
    """Candidate marginal packings as ``(gain, first, level, indices)``."""
    by_pair: dict[Pair, list[int]] = {}
    for i in range(len(symbols) - 1):
        by_pair.setdefault((symbols[i], symbols[i + 1]), []).append(i)
    out = []
    for pair, pos in by_pair.items():
        if pair[0] != pair[1]:
            out.append((len(pos), pos[0], 1, tuple(pos)))
            continue
        runs = _runs(pos)
        first = tuple(i for r in runs for i in r[0::2])
        second = tuple(i for r in runs for i in r[1::2])
        # concavity: the second packing of a pair never gains more than the first
        assert len(second) <= len(first)
        out.append((len(first), pos[0], 1, first))
        if second:
            out.append((len(second), pos[0], 2, second))
    out.sort(key=lambda c: (-c[0], c[1], c[2]))
    return out


def pk_value(symbols, k: int) -> int:
    return sum(c[0] for c in _packings(symbols)[:k])


def pk(text: Text, k: int) -> tuple[int, PackingCertificate]:
    """Size of an optimal k-packing with a witnessing certificate.

    Occurrences of distinct pairs never share a start index, so the problem
    splits per pair; each pair's gain curve is concave and the k packings are
    allocated greedily to the largest marginal gains.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    chosen = _packings(text.symbols)[:k]
    groups = tuple(tuple(sorted(c[3])) for c in chosen)
    cert = PackingCertificate(k, groups)
    return cert.size, cert


def fk(text: Text, k: int) -> int:
    """Total occurrences, overlaps counted, of the k most frequent pairs."""
    return top_k_pairs(text, k).total


def packing_from_merges(text: Text, seq: AnySequence) -> PackingCertificate:
    """k-packing charged by a (partial) merge sequence, one group per step.

    Every replacement is charged to the original index of the last symbol
    spelled by the left part of the pair, i.e. where the two halves are glued.
    """
    if isinstance(seq, MergeSequence):
        seq = to_partial(text, seq)
    # current text as (symbol, original start, original end) triples
    cur = [(s, i, i + 1) for i, s in enumerate(text.symbols)]
    groups = []
    for step in seq:
        rule = step.rule
        pos = set(step.positions)
        group = []
        nxt = []
        j = 0
        while j < len(cur):
            if j in pos:
                (a, sa, ea), (b, _, eb) = cur[j], cur[j + 1]
                if (a, b) != rule.pair:
                    raise ValueError(f"step position {j} does not hold {rule.pair}")
                group.append(ea - 1)
                nxt.append((rule.out, sa, eb))
                j += 2
            else:
                nxt.append(cur[j])
                j += 1
        cur = nxt
        groups.append(tuple(sorted(group)))
    return PackingCertificate(len(seq), tuple(groups))


PK_BRUTEFORCE_MAX_LEN = 20
PK_BRUTEFORCE_MAX_K = 4


def pk_bruteforce(text: Text, k: int) -> int:
    """Exact optimal k-packing size by exhaustive search over index assignments.

    Scans indices left to right; each index either joins one of the k groups
    or is skipped.  Groups are tracked only by the pair they hold, since every
    group is interchangeable with another holding the same pair.
    """
    s = text.symbols
    if len(s) > PK_BRUTEFORCE_MAX_LEN or k > PK_BRUTEFORCE_MAX_K:
        raise ValueError(
            f"pk_bruteforce is capped at |s| <= {PK_BRUTEFORCE_MAX_LEN}, "
            f"k <= {PK_BRUTEFORCE_MAX_K}")
    if k <= 0 or len(s) < 2:
        return 0
    pairs = [(s[i], s[i + 1]) for i in range(len(s) - 1)]

    @lru_cache(maxsize=None)
    def best(i: int, groups: tuple, blocked) -> int:
        # groups: sorted tuple of pairs (None = still empty); blocked: pair of
        # the group that took index i-1, which cannot take index i
        if i == len(pairs):
            return 0
        p = pairs[i]
        result = best(i + 1, groups, None)
        usable = groups.count(p) - (1 if blocked == p else 0)
        if usable > 0:
            result = max(result, 1 + best(i + 1, groups, p))
        if None in groups:
            g = list(groups)
            g.remove(None)
            g.append(p)
            g = tuple(sorted(g, key=lambda x: (x is None, x)))
            result = max(result, 1 + best(i + 1, g, p))
        return result

    return best(0, (None,) * k, None)
