"""JSON forms of merge tables, BPE traces and packing certificates."""

from __future__ import annotations

import json
from typing import Any

from .text import (INPUT, MERGE, SEPARATOR, Alphabet, AnySequence, Entry,
                   MergeRule, MergeSequence, PartialSequence, PartialStep)

VERSION = 1


class ModelError(ValueError):
    """A merge table is malformed or does not fit the data it is used with."""


def model_to_dict(alphabet: Alphabet, seq: AnySequence) -> dict[str, Any]:
    """Merge table for ``seq``; ``alphabet`` must already contain its outputs."""
    alphabet = alphabet.with_merges(seq.rules)
    d: dict[str, Any] = {
        "version": VERSION,
        "mode": alphabet.mode,
        "alphabet": [e.label for e in alphabet.entries],
        "merges": [[r.left, r.right, r.out] for r in seq.rules],
    }
    seps = [i for i, e in enumerate(alphabet.entries) if e.origin == SEPARATOR]
    if seps:
        d["separators"] = seps
    if isinstance(seq, PartialSequence):
        d["partial_positions"] = [list(s.positions) for s in seq]
    return d


def model_from_dict(d: Any) -> tuple[Alphabet, AnySequence]:
    if not isinstance(d, dict) or d.get("version") != VERSION:
        raise ModelError("unsupported or missing merge-table version")
    try:
        labels = [str(x) for x in d["alphabet"]]
        merges = [tuple(int(v) for v in m) for m in d["merges"]]
    except (KeyError, TypeError, ValueError) as e:
        raise ModelError(f"malformed merge table: {e}") from None
    if any(len(m) != 3 for m in merges):
        raise ModelError("each merge must be [left, right, out]")
    n = len(labels)
    rules = [MergeRule(*m) for m in merges]
    by_out = {}
    for r in rules:
        if not all(0 <= v < n for v in (r.left, r.right, r.out)):
            raise ModelError(f"merge {list(r.pair) + [r.out]} refers outside the alphabet")
        if r.out in by_out:
            raise ModelError(f"symbol {r.out} is produced by two merges")
        by_out[r.out] = r
    order = {r.out: j for j, r in enumerate(rules)}
    for j, r in enumerate(rules):
        # operands must be input symbols or outputs of earlier merges
        for v in (r.left, r.right):
            if v in order and order[v] >= j:
                raise ModelError(f"merge producing {r.out} uses {v} before it is defined")
    seps = set(d.get("separators", []))
    entries = []
    for i, lab in enumerate(labels):
        if i in by_out:
            entries.append(Entry(lab, MERGE, by_out[i]))
        else:
            entries.append(Entry(lab, SEPARATOR if i in seps else INPUT))
    mode = d.get("mode", "labels")
    if mode not in ("bytes", "codepoints", "labels"):
        raise ModelError(f"unknown mode {mode!r}")
    try:
        alphabet = Alphabet(tuple(entries), mode)
    except ValueError as e:
        raise ModelError(str(e)) from None
    positions = d.get("partial_positions")
    if positions is None:
        return alphabet, MergeSequence(tuple(rules))
    if len(positions) != len(rules):
        raise ModelError("partial_positions must have one entry per merge")
    return alphabet, PartialSequence(tuple(
        PartialStep(r, tuple(int(p) for p in pos)) for r, pos in zip(rules, positions)))


def dumps_model(alphabet: Alphabet, seq: AnySequence) -> str:
    return json.dumps(model_to_dict(alphabet, seq))


def loads_model(s: str) -> tuple[Alphabet, AnySequence]:
    try:
        d = json.loads(s)
    except json.JSONDecodeError as e:
        raise ModelError(f"invalid JSON: {e}") from None
    return model_from_dict(d)


def trace_to_dict(trace) -> dict[str, Any]:
    return {
        "steps": [{"pair": list(s.pair), "utility": s.utility, "len": s.length}
                  for s in trace.steps],
        "total": trace.total_utility,
    }


def certificate_to_dict(cert) -> dict[str, Any]:
    return {"k": cert.k, "groups": [list(g) for g in cert.groups], "size": cert.size}
