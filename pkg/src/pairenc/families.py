"""Adversarial instance families with their reference sequences.

* ``family_ratio``: BPE reaches only about 5/8 of the optimal utility.
* ``family_length``: BPE's compressed length is ``t+2`` while full merges
  can reach a single symbol, so the length ratio grows linearly.
* ``family_inputonly``: any method that only merges input symbols (EvenOdd
  included) gets little more than half of the optimum, which BPE finds.

Separator tokens ``|`` and ``#`` become a distinct fresh symbol at every
occurrence, as in the reduction instances.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .text import (AnySequence, MergeRule, MergeSequence, Text, fresh_rules,
                   replace_all)

UTILITY = "utility"
LENGTH = "length"


@dataclass(frozen=True)
class FamilyInstance:
    name: str
    text: Text
    k: int
    expected_bpe: int
    reference_seq: AnySequence
    expected_reference: int
    metric: str = UTILITY  # what expected_* measure: utility or compressed length
    extra: dict = field(default_factory=dict, compare=False)

    def metadata(self) -> dict:
        return {"family": self.name, "k": self.k, "length": len(self.text),
                "metric": self.metric, "expected_bpe": self.expected_bpe,
                "expected_reference": self.expected_reference, **self.extra}


RATIO_BLOCK = "abaacaaba|aca"


def _ratio_reference(text: Text) -> MergeSequence:
    a, b, c = (text.sym(x) for x in "abc")
    base = len(text.alphabet)
    x, y, z = base, base + 1, base + 2
    return MergeSequence((MergeRule(a, c, x), MergeRule(x, a, y),
                          MergeRule(a, b, z), MergeRule(z, a, base + 3)))


def ratio_base() -> FamilyInstance:
    """The single block on its own: BPE gets 5 where 8 is possible."""
    text = Text.from_tokens(list(RATIO_BLOCK), labels="abc")
    return FamilyInstance("ratio-base", text, 4, 5, _ratio_reference(text), 8)


def family_ratio(t: int) -> FamilyInstance:
    """``t`` copies of the block, each closed by a fresh ``#``, then ``aa``.

    The trailing ``aa`` makes ``aa`` strictly the most frequent pair, so BPE
    starts with it regardless of tie-breaking; BPE then earns ``5t+1`` while
    the reference ``ac, Xa, ab, Za`` earns ``8t``.
    """
    if t < 1:
        raise ValueError("t must be at least 1")
    tokens = (list(RATIO_BLOCK) + ["#"]) * t + ["a", "a"]
    text = Text.from_tokens(tokens, separators=("|", "#"), labels="abc")
    return FamilyInstance("ratio", text, 4, 5 * t + 1, _ratio_reference(text), 8 * t,
                          extra={"t": t, "ratio": (5 * t + 1) / (8 * t)})


def _collapse(symbols, base: int, pairs: list) -> MergeSequence:
    """Extend ``pairs`` by merging the first two symbols until one remains."""
    s = tuple(symbols)
    out = base
    for p in pairs:
        s = replace_all(s, p[0], p[1], out)
        out += 1
    while len(s) > 1:
        pairs.append((s[0], s[1]))
        s = replace_all(s, s[0], s[1], out)
        out += 1
    return fresh_rules(base, pairs)


def family_length(t: int) -> FamilyInstance:
    """``prod x_i aa y_i . prod |x_i a . prod |a y_i`` with ``k = 8t - 1``.

    BPE merges ``aa`` first and every later merge saves one symbol, leaving
    ``t + 2``; merging every ``x_i a`` and ``a y_i`` first and then gluing
    neighbours reduces the text to one symbol.  Expected values are lengths.
    """
    if t <= 2:
        raise ValueError("t must be greater than 2")
    xs = [f"x{i}" for i in range(1, t + 1)]
    ys = [f"y{i}" for i in range(1, t + 1)]
    tokens = []
    for x, y in zip(xs, ys):
        tokens += [x, "a", "a", y]
    for x in xs:
        tokens += ["|", x, "a"]
    for y in ys:
        tokens += ["|", "a", y]
    text = Text.from_tokens(tokens, labels=["a"] + xs + ys)
    a = text.sym("a")
    pairs = [(text.sym(x), a) for x in xs] + [(a, text.sym(y)) for y in ys]
    ref = _collapse(text.symbols, len(text.alphabet), pairs)
    assert len(ref) == 8 * t - 1
    return FamilyInstance("length", text, 8 * t - 1, t + 2, ref, 1, metric=LENGTH,
                          extra={"t": t})


def family_inputonly(n: int) -> FamilyInstance:
    """``2n`` copies of ``a`` followed by ``2(k-1)`` distinct symbols, ``k = log2 n + 1``.

    Repeatedly halving the run of ``a`` earns ``2n - 1``; merging only input
    symbols earns at most ``n`` from the run plus one per remaining merge.
    """
    if n < 2 or n & (n - 1):
        raise ValueError("n must be a power of two, at least 2")
    k = n.bit_length()  # log2(n) + 1
    distinct = [f"d{i}" for i in range(1, 2 * (k - 1) + 1)]
    text = Text.from_tokens(["a"] * (2 * n) + distinct, labels=["a"] + distinct)
    base = len(text.alphabet)
    pairs = [(text.sym("a"), text.sym("a"))] + [(base + i, base + i) for i in range(k - 1)]
    ref = fresh_rules(base, pairs)
    return FamilyInstance("inputonly", text, k, 2 * n - 1, ref, 2 * n - 1,
                          extra={"n": n, "input_only_ceiling": n + k - 1})


FAMILIES = {"ratio": family_ratio, "length": family_length, "inputonly": family_inputonly}
