"""Random instance and sequence generators shared by the test modules."""

import random

from pairenc.text import (MergeRule, MergeSequence, PartialSequence,
                          PartialStep, Text, occurrences, pair_stats,
                          replace_all, replace_at)


def random_text(rng: random.Random, max_len=30, max_sigma=4, min_len=0) -> Text:
    sigma = rng.randint(1, max_sigma)
    n = rng.randint(min_len, max_len)
    return Text.from_str("".join(rng.choice("abcd"[:sigma]) for _ in range(n)))


def _pick_pair(rng, s, prefer=()):
    present = list(dict.fromkeys(zip(s, s[1:])))
    if not present:
        return None
    preferred = [p for p in present if p in prefer]
    if preferred and rng.random() < 0.75:
        return rng.choice(preferred)
    return rng.choice(present)


def random_merge_sequence(rng: random.Random, text: Text, k: int, prefer=()) -> MergeSequence:
    """A valid full sequence of exactly ``k`` merges of pairs present at each step
    (an absent pair is used once the text has no pairs left)."""
    s = text.symbols
    base = len(text.alphabet)
    rules = []
    for i in range(k):
        pair = _pick_pair(rng, s, prefer) or (0, 0)
        rule = MergeRule(pair[0], pair[1], base + i)
        rules.append(rule)
        s = replace_all(s, rule.left, rule.right, rule.out)
    return MergeSequence(tuple(rules))


def random_positions(rng: random.Random, s, pair):
    chosen = []
    for p in occurrences(s, pair):
        if (not chosen or p - chosen[-1] >= 2) and rng.random() < 0.6:
            chosen.append(p)
    return chosen


def random_partial_sequence(rng: random.Random, text: Text, k: int, prefer=()) -> PartialSequence:
    s = text.symbols
    base = len(text.alphabet)
    steps = []
    for i in range(k):
        pair = _pick_pair(rng, s, prefer) or (0, 0)
        rule = MergeRule(pair[0], pair[1], base + i)
        pos = random_positions(rng, s, pair)
        steps.append(PartialStep(rule, tuple(pos)))
        s = replace_at(s, pos, rule.out)
    return PartialSequence(tuple(steps))


def top_pairs(text: Text, k: int):
    _, freq, first = pair_stats(text.symbols)
    return sorted(freq, key=lambda p: (-freq[p], first[p]))[:k]


FIG23 = "abcd|bc|bcda|cd|cdab|da|dabc|ab"


def fig23_text() -> Text:
    return Text.from_str(FIG23, separator="|")


def partial_from_original(text: Text, steps):
    """Named partial sequence from ``((left, right, out), original indices)`` steps.

    Only valid when every step merges input symbols: an original index is
    shifted left once per earlier replacement that starts before it.
    """
    from pairenc.text import named_rules

    done = []
    positions = []
    for _, orig in steps:
        positions.append([i - sum(1 for d in done if d < i) for i in orig])
        done += orig
    return named_rules(text, [triple for triple, _ in steps], partial=positions)


def reduction_pairs(inst):
    return {inst.hh} | {inst.lh(i) for i in range(inst.n)} | {inst.hl(i) for i in range(inst.n)}


def random_reduction_sequence(rng: random.Random, inst, partial=False):
    """A length-``k`` sequence on a reduction instance, biased towards the
    vertex and ``##`` pairs but free to merge separators, new symbols or
    the same pair twice."""
    prefer = reduction_pairs(inst) if rng.random() < 0.9 else ()
    gen = random_partial_sequence if partial else random_merge_sequence
    return gen(rng, inst.text, inst.k, prefer)
