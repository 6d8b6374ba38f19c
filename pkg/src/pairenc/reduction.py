"""Max-cut on cubic graphs reduced to optimal merge sequence / pair encoding.

For a cubic graph on vertices ``0..n-1`` the instance text concatenates, in
edge-list order, one block ``#li##lj#|#lj##li#|`` per edge ``i < j``, then four
copies of ``li#|#li|li#li|`` per vertex, then ``20n`` copies of ``##|``.  Every
``|`` is a distinct symbol.  The budget is ``k = n + 1``.

A *well-formed* sequence merges ``##`` and exactly one of ``li#`` / ``#li``
for every vertex; choosing ``#li`` puts ``i`` on the S side of a cut.  With
``##`` merged last the utility is ``34n`` plus the cut size.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional

from .text import (SEPARATOR, AnySequence, MergeSequence, Pair,
                   PartialSequence, Text, apply, fresh_rules, greedy_positions,
                   replace_all)


class NotCubicError(ValueError):
    pass


class NotWellFormedError(ValueError):
    pass


@dataclass(frozen=True)
class CubicGraph:
    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        edges = tuple((min(u, v), max(u, v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        if self.n < 4 or self.n % 2:
            raise NotCubicError(f"a cubic graph needs an even n >= 4, got {self.n}")
        deg = [0] * self.n
        for u, v in edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise NotCubicError(f"edge ({u}, {v}) has a vertex out of range")
            if u == v:
                raise NotCubicError(f"loop at vertex {u}")
            deg[u] += 1
            deg[v] += 1
        if len(set(edges)) != len(edges):
            raise NotCubicError("graph has parallel edges")
        bad = [v for v, d in enumerate(deg) if d != 3]
        if bad:
            raise NotCubicError(f"vertex {bad[0]} has degree {deg[bad[0]]}, expected 3")

    def neighbours(self, v: int) -> list[int]:
        return [b if a == v else a for a, b in self.edges if v in (a, b)]


@dataclass(frozen=True)
class Cut:
    side: frozenset
    size: int


def make_cut(g: CubicGraph, side: Iterable[int]) -> Cut:
    side = frozenset(side)
    if any(not 0 <= v < g.n for v in side):
        raise ValueError("cut side has a vertex outside the graph")
    return Cut(side, sum((u in side) != (v in side) for u, v in g.edges))


@dataclass(frozen=True)
class Segment:
    kind: str  # "edge", "vertex" or "pad"
    key: object  # (i, j), i or None
    start: int
    end: int


@dataclass(frozen=True)
class ReductionInstance:
    graph: CubicGraph
    text: Text
    k: int
    hash: int
    ell: tuple[int, ...]
    segments: tuple[Segment, ...]
    _pieces: Counter = field(compare=False, repr=False, default_factory=Counter)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def hh(self) -> Pair:
        return (self.hash, self.hash)

    def lh(self, i: int) -> Pair:
        return (self.ell[i], self.hash)

    def hl(self, i: int) -> Pair:
        return (self.hash, self.ell[i])

    def vertex_of(self, pair: Pair) -> Optional[int]:
        """Vertex whose ``li#`` or ``#li`` pair this is, else None."""
        a, b = pair
        if a == self.hash and b != self.hash and b in self.ell:
            return self.ell.index(b)
        if b == self.hash and a != self.hash and a in self.ell:
            return self.ell.index(a)
        return None

    def segment_map(self) -> list[dict]:
        return [{"kind": s.kind, "key": s.key, "start": s.start, "end": s.end}
                for s in self.segments]


def gen_instance(g: CubicGraph) -> ReductionInstance:
    n = g.n
    ell = [f"l{i}" for i in range(n)]
    tokens: list[str] = []
    segments = []

    def add(kind, key, block):
        segments.append(Segment(kind, key, len(tokens), len(tokens) + len(block)))
        tokens.extend(block)

    for i, j in g.edges:
        li, lj = ell[i], ell[j]
        add("edge", (i, j), ["#", li, "#", "#", lj, "#", "|", "#", lj, "#", "#", li, "#", "|"])
    for i in range(n):
        li = ell[i]
        for _ in range(4):
            add("vertex", i, [li, "#", "|", "#", li, "|", li, "#", li, "|"])
    for _ in range(20 * n):
        add("pad", None, ["#", "#", "|"])

    text = Text.from_tokens(tokens, labels=["#"] + ell)
    pieces: Counter = Counter()
    cur: list[int] = []
    for sym in text.symbols:
        if text.alphabet.origin(sym) == SEPARATOR:
            pieces[tuple(cur)] += 1
            cur = []
        else:
            cur.append(sym)
    return ReductionInstance(g, text, n + 1, 0, tuple(range(1, n + 1)),
                             tuple(segments), pieces)


def instance_utility(inst: ReductionInstance, seq: AnySequence) -> int:
    """Utility of ``seq`` on the instance text.

    Full sequences that never touch a separator act on each separator-free
    piece independently, so only the distinct pieces are simulated.
    """
    seps_touched = any(inst.text.alphabet.origin(x) == SEPARATOR
                       for r in seq.rules for x in (r.left, r.right)
                       if x < len(inst.text.alphabet))
    if isinstance(seq, PartialSequence) or seps_touched:
        return len(inst.text) - len(apply(inst.text, seq))
    base = len(inst.text.alphabet)
    outs = [r.out for r in seq]
    if sorted(outs) != list(range(base, base + len(outs))):
        # leave the reporting of freshness errors to the general path
        return len(inst.text) - len(apply(inst.text, seq))
    total = 0
    for piece, count in inst._pieces.items():
        s = piece
        present = set(s)
        for r in seq:
            if r.left in present and r.right in present:
                s = replace_all(s, r.left, r.right, r.out)
                present = set(s)
        total += count * (len(piece) - len(s))
    return total


def cut_to_sequence(inst: ReductionInstance, cut: Cut) -> MergeSequence:
    """``#li`` for vertices in the cut side, ``li#`` otherwise, then ``##``."""
    pairs = [inst.hl(i) if i in cut.side else inst.lh(i) for i in range(inst.n)]
    return fresh_rules(len(inst.text.alphabet), pairs + [inst.hh])


def is_well_formed(inst: ReductionInstance, seq: AnySequence) -> bool:
    if not isinstance(seq, MergeSequence) or len(seq) != inst.k:
        return False
    pairs = Counter(seq.pairs)
    if pairs[inst.hh] != 1:
        return False
    return all(pairs[inst.lh(i)] + pairs[inst.hl(i)] == 1 for i in range(inst.n))


def sequence_to_cut(inst: ReductionInstance, seq: MergeSequence) -> Cut:
    """The cut whose S side holds the vertices merged as ``#li``."""
    if not is_well_formed(inst, seq):
        raise NotWellFormedError("sequence is not well-formed; pass it through well_form first")
    pairs = set(seq.pairs)
    return make_cut(inst.graph, (i for i in range(inst.n) if inst.hl(i) in pairs))


def _canonical_wf(inst: ReductionInstance) -> MergeSequence:
    return cut_to_sequence(inst, Cut(frozenset(), 0))


def well_form(inst: ReductionInstance, seq: MergeSequence) -> MergeSequence:
    """Repair a full sequence of length ``k`` into a well-formed one.

    Keeps the first ``##`` merge and, per vertex, the first of its two pair
    merges, in their original order; every other merge is dropped and the
    freed slots are filled with ``li#`` for the uncovered vertices, lowest
    index first, appended at the end.  A sequence that never merges ``##``
    is replaced outright by all ``li#`` followed by ``##``.
    """
    if len(seq) != inst.k:
        raise ValueError(f"expected a sequence of length {inst.k}, got {len(seq)}")
    if is_well_formed(inst, seq):
        return seq
    pairs = seq.pairs
    if inst.hh not in pairs:
        return _canonical_wf(inst)
    kept: list[Pair] = []
    covered: set[int] = set()
    have_hh = False
    for p in pairs:
        v = inst.vertex_of(p)
        if p == inst.hh and not have_hh:
            have_hh = True
            kept.append(p)
        elif v is not None and v not in covered:
            covered.add(v)
            kept.append(p)
    kept += [inst.lh(i) for i in range(inst.n) if i not in covered]
    return fresh_rules(len(inst.text.alphabet), kept)


def _is_full(text: Text, seq: PartialSequence) -> bool:
    s = text.symbols
    for step in seq:
        pos = greedy_positions(s, step.rule.pair)
        if tuple(pos) != tuple(step.positions):
            return False
        s = replace_all(s, step.rule.left, step.rule.right, step.rule.out)
    return True


def well_form_partial(inst: ReductionInstance, seq: AnySequence) -> MergeSequence:
    """Turn a (partial) sequence of length ``k`` into a well-formed full one.

    Steps on separators or merge-created symbols and repeated pairs are
    dropped; for a vertex with both pair merges only the earlier one stays;
    vertices left uncovered get ``li#``.  All merges become full and ``##``
    moves to the end, where replacing every occurrence can only help.
    Without any ``##`` step the result is all ``li#`` followed by ``##``.
    """
    if len(seq) != inst.k:
        raise ValueError(f"expected a sequence of length {inst.k}, got {len(seq)}")
    if isinstance(seq, PartialSequence) and _is_full(inst.text, seq):
        seq = MergeSequence(seq.rules)
    if is_well_formed(inst, seq):
        return seq
    pairs = seq.pairs
    if inst.hh not in pairs:
        return _canonical_wf(inst)
    chosen: dict[int, Pair] = {}
    for p in pairs:
        v = inst.vertex_of(p)
        if v is not None:
            chosen.setdefault(v, p)
    kept = list(chosen.values())  # insertion order = order of first appearance
    kept += [inst.lh(i) for i in range(inst.n) if i not in chosen]
    return fresh_rules(len(inst.text.alphabet), kept + [inst.hh])


MAX_BRUTEFORCE_N = 20


def max_cut_bruteforce(g: CubicGraph) -> Cut:
    """Maximum cut by enumerating the 2^(n-1) bipartitions with vertex n-1 outside S."""
    if g.n > MAX_BRUTEFORCE_N:
        raise ValueError(f"max_cut_bruteforce is capped at n <= {MAX_BRUTEFORCE_N}")
    best_mask, best = 0, -1
    for mask in range(1 << (g.n - 1)):
        c = sum(((mask >> u) ^ (mask >> v)) & 1 for u, v in g.edges)
        if c > best:
            best_mask, best = mask, c
    return Cut(frozenset(i for i in range(g.n) if best_mask >> i & 1), best)


def wellformed_sequences(inst: ReductionInstance) -> Iterable[tuple[Cut, MergeSequence]]:
    """All 2^n well-formed sequences with ``##`` last, with their cuts."""
    n = inst.n
    for mask in range(1 << n):
        cut = make_cut(inst.graph, (i for i in range(n) if mask >> i & 1))
        yield cut, cut_to_sequence(inst, cut)


def oms_opt_wellformed(inst: ReductionInstance) -> int:
    """Best utility among well-formed sequences (sign choices, ``##`` last)."""
    if inst.n > MAX_BRUTEFORCE_N:
        raise ValueError(f"oms_opt_wellformed is capped at n <= {MAX_BRUTEFORCE_N}")
    return max(instance_utility(inst, seq) for _, seq in wellformed_sequences(inst))


# ---------------------------------------------------------------------------
# graphs


def k4() -> CubicGraph:
    return CubicGraph(4, tuple(combinations(range(4), 2)))


def k33() -> CubicGraph:
    return CubicGraph(6, tuple((i, j) for i in range(3) for j in range(3, 6)))


def petersen() -> CubicGraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    return CubicGraph(10, tuple(outer + inner + spokes))


NAMED_GRAPHS = {"k4": k4, "k33": k33, "petersen": petersen}


def random_cubic(n: int, seed: int = 0, max_tries: int = 10_000) -> CubicGraph:
    """Random simple cubic graph from the pairing model, rejecting loops and repeats."""
    if n < 4 or n % 2:
        raise ValueError("n must be even and at least 4")
    rng = random.Random(seed)
    points = [v for v in range(n) for _ in range(3)]
    for _ in range(max_tries):
        rng.shuffle(points)
        edges = set()
        for a, b in zip(points[0::2], points[1::2]):
            e = (min(a, b), max(a, b))
            if a == b or e in edges:
                break
            edges.add(e)
        else:
            return CubicGraph(n, tuple(sorted(edges)))
    raise RuntimeError(f"no simple cubic graph found in {max_tries} tries")


def parse_edge_list(data: str) -> CubicGraph:
    """Parse an ``n m`` header followed by ``m`` lines of 1-indexed ``u v``."""
    rows = [ln.split() for ln in data.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise ValueError("edge list must start with an 'n m' header")
    try:
        n, m = map(int, rows[0])
        edges = [(int(u) - 1, int(v) - 1) for u, v in rows[1:]]
    except ValueError as e:
        raise ValueError(f"malformed edge list: {e}") from None
    if len(edges) != m:
        raise ValueError(f"header announces {m} edges, found {len(edges)}")
    return CubicGraph(n, tuple(edges))


def format_edge_list(g: CubicGraph) -> str:
    lines = [f"{g.n} {len(g.edges)}"] + [f"{u + 1} {v + 1}" for u, v in g.edges]
    return "\n".join(lines) + "\n"

