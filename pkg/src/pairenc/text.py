"""Symbol strings, alphabets and pair-replacement semantics.

Every algorithm in the package operates on :class:`Text` values: immutable
sequences of integer symbol ids paired with an :class:`Alphabet` that maps
ids to labels.  Merge rules rewrite a pair of adjacent symbols into a fresh
symbol; full rules rewrite every non-overlapping occurrence scanning left to
right, partial steps rewrite an explicit set of occurrences.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence, Tuple, Union

Symbol = int
Pair = Tuple[int, int]

INPUT = "input"
SEPARATOR = "separator"
MERGE = "merge"


class FreshnessError(ValueError):
    """A rule's output symbol is not fresh for the text it is applied to."""


class InvalidStepError(ValueError):
    """A partial step names positions that do not hold its pair."""


@dataclass(frozen=True)
class MergeRule:
    left: Symbol
    right: Symbol
    out: Symbol

    @property
    def pair(self) -> Pair:
        return (self.left, self.right)


@dataclass(frozen=True)
class MergeSequence:
    rules: Tuple[MergeRule, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self) -> Iterator[MergeRule]:
        return iter(self.rules)

    def __getitem__(self, i):
        return self.rules[i]

    @property
    def pairs(self) -> list[Pair]:
        return [r.pair for r in self.rules]


@dataclass(frozen=True)
class PartialStep:
    rule: MergeRule
    positions: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(self.positions))


@dataclass(frozen=True)
class PartialSequence:
    steps: Tuple[PartialStep, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[PartialStep]:
        return iter(self.steps)

    def __getitem__(self, i):
        return self.steps[i]

    @property
    def rules(self) -> Tuple[MergeRule, ...]:
        return tuple(s.rule for s in self.steps)

    @property
    def pairs(self) -> list[Pair]:
        return [s.rule.pair for s in self.steps]


AnySequence = Union[MergeSequence, PartialSequence]


@dataclass(frozen=True)
class Entry:
    label: str
    origin: str = INPUT
    rule: MergeRule | None = None


@dataclass(frozen=True)
class Alphabet:
    """Ordered, append-only table of symbol labels.

    ``mode`` records how input symbols were ingested: ``"bytes"`` (one
    symbol per byte value), ``"codepoints"`` (one per character) or
    ``"labels"`` (arbitrary names, used by the instance generators).
    """

    entries: Tuple[Entry, ...] = ()
    mode: str = "labels"

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if len(self._index) != len(self.entries):
            raise ValueError("alphabet labels must be unique")

    @classmethod
    def from_labels(cls, labels: Iterable[str], mode: str = "labels") -> "Alphabet":
        return cls(tuple(Entry(lab) for lab in labels), mode)

    @classmethod
    def byte_level(cls) -> "Alphabet":
        return cls.from_labels((chr(b) for b in range(256)), mode="bytes")

    @cached_property
    def _index(self) -> dict[str, int]:
        return {e.label: i for i, e in enumerate(self.entries)}

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, label: str) -> bool:
        return label in self._index

    def label(self, sym: Symbol) -> str:
        return self.entries[sym].label

    def id(self, label: str) -> Symbol:
        return self._index[label]

    def origin(self, sym: Symbol) -> str:
        return self.entries[sym].origin

    def is_input(self, sym: Symbol) -> bool:
        """True for symbols of the original text (separators included)."""
        return self.entries[sym].origin != MERGE

    def rule(self, sym: Symbol) -> MergeRule | None:
        return self.entries[sym].rule

    def _unique(self, label: str) -> str:
        while label in self._index:
            label += "'"
        return label

    def with_merge(self, rule: MergeRule, label: str | None = None) -> "Alphabet":
        if rule.out != len(self):
            raise FreshnessError(
                f"new symbol id must be {len(self)}, got {rule.out}")
        label = self._unique(label or f"<{rule.out}>")
        return Alphabet(self.entries + (Entry(label, MERGE, rule),), self.mode)

    def with_merges(self, rules: Iterable[MergeRule]) -> "Alphabet":
        entries = list(self.entries)
        index = dict(self._index)
        for rule in rules:
            if rule.out < len(entries):
                if entries[rule.out].rule != rule:
                    raise FreshnessError(f"symbol {rule.out} already defined")
                continue
            if rule.out != len(entries):
                raise FreshnessError(
                    f"new symbol id must be {len(entries)}, got {rule.out}")
            label = f"<{rule.out}>"
            while label in index:
                label += "'"
            index[label] = rule.out
            entries.append(Entry(label, MERGE, rule))
        return Alphabet(tuple(entries), self.mode)

    def with_separator(self, char: str = "|") -> Tuple["Alphabet", Symbol]:
        n = sum(1 for e in self.entries if e.origin == SEPARATOR) + 1
        label = self._unique(f"{char}{n}")
        return (Alphabet(self.entries + (Entry(label, SEPARATOR),), self.mode),
                len(self))

    def render(self, sym: Symbol) -> str:
        """String spelled by ``sym`` in terms of input labels."""
        out = []
        stack = [sym]
        while stack:
            s = stack.pop()
            e = self.entries[s]
            if e.origin == MERGE:
                stack.append(e.rule.right)
                stack.append(e.rule.left)
            elif e.origin == SEPARATOR:
                out.append(e.label[0])
            else:
                out.append(e.label)
        return "".join(out)


@dataclass(frozen=True)
class Text:
    symbols: Tuple[Symbol, ...]
    alphabet: Alphabet = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if self.symbols and (max(self.symbols) >= len(self.alphabet)
                             or min(self.symbols) < 0):
            raise ValueError("text contains a symbol outside its alphabet")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_str(cls, s: str, separator: str | None = None) -> "Text":
        """Codepoint-level text; every character of ``separator`` marks a fresh symbol."""
        seps = set(separator or "")
        chars = sorted({c for c in s if c not in seps})
        return cls.from_tokens(list(s), separators=seps, labels=chars, mode="codepoints")

    @classmethod
    def from_bytes(cls, data: bytes, separator: int | Iterable[int] | None = None) -> "Text":
        """Byte-level text (256 input symbols); separator bytes become fresh symbols."""
        alphabet = Alphabet.byte_level()
        if separator is None:
            return cls(tuple(data), alphabet)
        seps = {separator} if isinstance(separator, int) else set(separator)
        entries = list(alphabet.entries)
        symbols = []
        for b in data:
            if b in seps:
                entries.append(Entry(f"{chr(b)}{len(entries) - 255}", SEPARATOR))
                symbols.append(len(entries) - 1)
            else:
                symbols.append(b)
        return cls(tuple(symbols), Alphabet(tuple(entries), "bytes"))

    @classmethod
    def from_labels(cls, labels: Sequence[str], alphabet: Alphabet | None = None) -> "Text":
        if alphabet is None:
            alphabet = Alphabet.from_labels(dict.fromkeys(labels))
        return cls(tuple(alphabet.id(lab) for lab in labels), alphabet)

    @classmethod
    def from_tokens(cls, tokens: Sequence[str], separators: Iterable[str] = ("|",),
                    labels: Sequence[str] | None = None, mode: str = "labels") -> "Text":
        """Text over named symbols where each separator token is a fresh symbol.

        Input symbols get ids in order of ``labels`` (default: first
        appearance); the separators follow, numbered in text order.
        """
        seps = set(separators)
        if labels is None:
            labels = list(dict.fromkeys(t for t in tokens if t not in seps))
        entries = [Entry(lab) for lab in labels]
        index = {lab: i for i, lab in enumerate(labels)}
        symbols = []
        for tok in tokens:
            if tok in seps:
                entries.append(Entry(f"{tok}{len(entries) - len(labels) + 1}", SEPARATOR))
                symbols.append(len(entries) - 1)
            else:
                symbols.append(index[tok])
        return cls(tuple(symbols), Alphabet(tuple(entries), mode))

    # -- sequence protocol ------------------------------------------------

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[Symbol]:
        return iter(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]

    def labels(self) -> list[str]:
        return [self.alphabet.label(s) for s in self.symbols]

    def sym(self, label: str) -> Symbol:
        return self.alphabet.id(label)

    def pair(self, left: str, right: str) -> Pair:
        return (self.alphabet.id(left), self.alphabet.id(right))

    def with_symbols(self, symbols: Iterable[Symbol]) -> "Text":
        return Text(tuple(symbols), self.alphabet)

    def render(self) -> str:
        return "".join(self.alphabet.render(s) for s in self.symbols)

    def to_bytes(self) -> bytes:
        """Byte content of the text, expanding merged symbols."""
        rendered = self.render()
        if self.alphabet.mode == "bytes":
            return rendered.encode("latin-1")
        return rendered.encode("utf-8")

    def __str__(self) -> str:
        return " ".join(self.labels())


# ---------------------------------------------------------------------------
# tuple-level kernels shared with the search modules


def replace_all(seq: Sequence[int], left: int, right: int, out: int) -> tuple:
    """Left-to-right replacement of every non-overlapping ``left right``."""
    res = []
    i, n = 0, len(seq)
    while i < n:
        if i + 1 < n and seq[i] == left and seq[i + 1] == right:
            res.append(out)
            i += 2
        else:
            res.append(seq[i])
            i += 1
    return tuple(res)


def pair_stats(seq: Sequence[int]) -> Tuple[dict, dict, dict]:
    """Return ``(replaceable, freq, first)`` dictionaries keyed by pair."""
    rc: dict = {}
    freq: dict = {}
    first: dict = {}
    last: dict = {}
    for i in range(len(seq) - 1):
        p = (seq[i], seq[i + 1])
        if p in freq:
            freq[p] += 1
            if last[p] != i - 1:
                rc[p] += 1
                last[p] = i
        else:
            freq[p] = rc[p] = 1
            first[p] = last[p] = i
    return rc, freq, first


def occurrences(seq: Sequence[int], pair: Pair) -> list[int]:
    a, b = pair
    return [i for i in range(len(seq) - 1) if seq[i] == a and seq[i + 1] == b]


def greedy_positions(seq: Sequence[int], pair: Pair) -> list[int]:
    """Positions a full left-to-right merge of ``pair`` would replace."""
    pos = []
    for i in occurrences(seq, pair):
        if not pos or pos[-1] != i - 1:
            pos.append(i)
    return pos


def replace_at(seq: Sequence[int], positions: Iterable[int], out: int) -> tuple:
    res = []
    it = iter(sorted(positions))
    nxt = next(it, None)
    i = 0
    while i < len(seq):
        if i == nxt:
            res.append(out)
            i += 2
            nxt = next(it, None)
        else:
            res.append(seq[i])
            i += 1
    return tuple(res)


class PairIndex:
    """Linked-list view of a symbol string with a pair -> positions index.

    Positions are indices into the original string; a merged symbol keeps the
    position of its left part, so position order equals current text order.
    """

    def __init__(self, symbols: Sequence[int]):
        n = len(symbols)
        self.sym = list(symbols)
        self.nxt = list(range(1, n + 1))
        self.prv = list(range(-1, n - 1))
        if n:
            self.nxt[-1] = -1
        self.length = n
        self.occ: dict = defaultdict(set)
        for i in range(n - 1):
            self.occ[(symbols[i], symbols[i + 1])].add(i)
        self.touched: set = set()

    def _add(self, pair, i):
        self.occ[pair].add(i)
        self.touched.add(pair)

    def _remove(self, pair, i):
        s = self.occ.get(pair)
        if s is not None:
            s.discard(i)
            if not s:
                del self.occ[pair]
        self.touched.add(pair)

    def replaceable(self, pair: Pair) -> int:
        pos = self.occ.get(pair)
        if not pos:
            return 0
        if pair[0] != pair[1]:
            return len(pos)
        count, last = 0, None
        for p in sorted(pos):
            if last is not None and self.nxt[last] == p:
                continue
            count += 1
            last = p
        return count

    def merge(self, pair: Pair, out: int) -> int:
        """Replace all occurrences of ``pair`` left to right; return count."""
        positions = self.occ.get(pair)
        if not positions:
            return 0
        x, y = pair
        sym, nxt, prv = self.sym, self.nxt, self.prv
        count = 0
        for p in sorted(positions):
            if sym[p] != x:
                continue
            q = nxt[p]
            if q < 0 or sym[q] != y:
                continue
            a, r = prv[p], nxt[q]
            self._remove(pair, p)
            if a >= 0:
                self._remove((sym[a], x), a)
            if r >= 0:
                self._remove((y, sym[r]), q)
            sym[p] = out
            sym[q] = -1
            nxt[p] = r
            if r >= 0:
                prv[r] = p
            if a >= 0:
                self._add((sym[a], out), a)
            if r >= 0:
                self._add((out, sym[r]), p)
            count += 1
        self.length -= count
        return count

    def symbols(self) -> tuple:
        out = []
        i = 0 if self.sym else -1
        while i >= 0:
            out.append(self.sym[i])
            i = self.nxt[i]
        return tuple(out)


# ---------------------------------------------------------------------------
# public operations


def _check_fresh(text: Text, rule: MergeRule) -> None:
    if rule.out in text.symbols:
        raise FreshnessError(f"symbol {rule.out} already occurs in the text")
    if rule.out < len(text.alphabet):
        if text.alphabet.rule(rule.out) != rule:
            raise FreshnessError(
                f"symbol {rule.out} ({text.alphabet.label(rule.out)!r}) "
                "is already defined in the alphabet")
    elif rule.out != len(text.alphabet):
        raise FreshnessError(
            f"new symbol id must be {len(text.alphabet)}, got {rule.out}")


def _grow(alphabet: Alphabet, rule: MergeRule) -> Alphabet:
    if rule.out < len(alphabet):
        return alphabet
    return alphabet.with_merge(rule)


def _check_sequence(text: Text, rules: Sequence[MergeRule]) -> None:
    seen = set(text.symbols)
    for rule in rules:
        if rule.out in seen:
            raise FreshnessError(
                f"symbol {rule.out} is not fresh relative to earlier rules")
        seen.update((rule.left, rule.right, rule.out))


def apply_rule(text: Text, rule: MergeRule) -> Text:
    """Replace all non-overlapping occurrences of ``rule.pair``, left to right.

    >>> t = Text.from_str("aaa")
    >>> apply_rule(t, MergeRule(0, 0, 1)).symbols
    (1, 0)
    """
    _check_fresh(text, rule)
    return Text(replace_all(text.symbols, rule.left, rule.right, rule.out),
                _grow(text.alphabet, rule))


def apply_sequence(text: Text, seq: MergeSequence) -> Text:
    rules = seq.rules
    _check_sequence(text, rules)
    alphabet = text.alphabet.with_merges(rules)
    if len(rules) * len(text) <= 200_000:
        symbols = text.symbols
        for rule in rules:
            symbols = replace_all(symbols, rule.left, rule.right, rule.out)
        return Text(symbols, alphabet)
    index = PairIndex(text.symbols)
    for rule in rules:
        index.merge(rule.pair, rule.out)
    return Text(index.symbols(), alphabet)


def apply_partial(text: Text, step: PartialStep) -> Text:
    """Replace exactly the occurrences of the step's pair at ``positions``."""
    rule, pos = step.rule, step.positions
    s = text.symbols
    for j, p in enumerate(pos):
        if not (0 <= p < len(s) - 1) or s[p] != rule.left or s[p + 1] != rule.right:
            raise InvalidStepError(f"position {p} does not hold pair {rule.pair}")
        if j and p - pos[j - 1] < 2:
            raise InvalidStepError(
                f"positions {pos[j - 1]} and {p} overlap or are unsorted")
    if not pos:
        if rule.out in s:
            raise FreshnessError(f"symbol {rule.out} already occurs in the text")
        return text if rule.out < len(text.alphabet) else Text(s, _grow(text.alphabet, rule))
    _check_fresh(text, rule)
    return Text(replace_at(s, pos, rule.out), _grow(text.alphabet, rule))


def apply_partial_sequence(text: Text, seq: PartialSequence) -> Text:
    _check_sequence(text, seq.rules)
    for step in seq:
        text = apply_partial(text, step)
    return text


def apply(text: Text, seq: AnySequence) -> Text:
    if isinstance(seq, PartialSequence):
        return apply_partial_sequence(text, seq)
    return apply_sequence(text, seq)


def decode(text: Text, seq: AnySequence) -> Text:
    """Expand the symbols introduced by ``seq`` back into their pairs."""
    expand = {r.out: (r.left, r.right) for r in seq.rules}
    out = []
    for s in text.symbols:
        if s not in expand:
            out.append(s)
            continue
        stack = [s]
        while stack:
            x = stack.pop()
            if x in expand:
                left, right = expand[x]
                stack.append(right)
                stack.append(left)
            else:
                out.append(x)
    return Text(tuple(out), text.alphabet)


def utility(text: Text, seq: AnySequence) -> int:
    return len(text) - len(apply(text, seq))


def freq(text: Text, pair: Pair) -> int:
    """Number of possibly overlapping occurrences of ``pair``."""
    return len(occurrences(text.symbols, pair))


def replaceable_count(text: Text, pair: Pair) -> int:
    """How many occurrences a full left-to-right merge of ``pair`` replaces."""
    return len(greedy_positions(text.symbols, pair))


def to_partial(text: Text, seq: MergeSequence) -> PartialSequence:
    """The partial sequence whose steps list every position a full merge hits."""
    steps = []
    s = text.symbols
    for rule in seq:
        pos = greedy_positions(s, rule.pair)
        steps.append(PartialStep(rule, tuple(pos)))
        s = replace_at(s, pos, rule.out)
    return PartialSequence(tuple(steps))


def fresh_rules(base_size: int, pairs: Iterable[Pair]) -> MergeSequence:
    """Rules for ``pairs`` with output ids ``base_size, base_size+1, ...``."""
    return MergeSequence(tuple(MergeRule(a, b, base_size + i)
                               for i, (a, b) in enumerate(pairs)))


def named_rules(text: Text, triples: Iterable[Tuple[str, str, str]],
                partial: Sequence[Sequence[int]] | None = None):
    """Build rules from ``(left, right, out)`` labels, registering the outputs.

    Returns ``(text', seq)`` where ``text'`` has the same symbols as ``text``
    and an alphabet that already names the new symbols, so applying ``seq``
    to it yields readable labels.  With ``partial`` (one position list per
    rule) a :class:`PartialSequence` is returned instead.
    """
    alphabet = text.alphabet
    rules = []
    for left, right, out in triples:
        rule = MergeRule(alphabet.id(left), alphabet.id(right), len(alphabet))
        alphabet = alphabet.with_merge(rule, out)
        rules.append(rule)
    text = Text(text.symbols, alphabet)
    if partial is None:
        return text, MergeSequence(tuple(rules))
    if len(partial) != len(rules):
        raise ValueError("need one position list per rule")
    return text, PartialSequence(tuple(PartialStep(r, tuple(p))
                                       for r, p in zip(rules, partial)))
