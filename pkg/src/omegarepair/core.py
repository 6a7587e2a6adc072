"""Core model types: Kripke structures, Buchi automata, repair machines,
lassos, and exact aggregator evaluation on ultimately periodic cost sequences.

All values are exact rationals (``fractions.Fraction``); no floating point
leaks into any user-visible quantity.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Tuple, Union


class AggregatorKind(enum.Enum):
    DSUM = "DSUM"
    MEAN = "MEAN"
    SUP = "SUP"
    LIMSUP = "LIMSUP"


@dataclass(frozen=True)
class Aggregator:
    """Cost aggregation semantics: maps infinite cost sequences to a scalar."""

    kind: AggregatorKind
    lam: Optional[Fraction] = None

    def __post_init__(self):
        if self.kind is AggregatorKind.DSUM:
            if self.lam is None or not (0 < self.lam < 1):
                raise ValueError("DSUM requires a discount factor in (0, 1)")
        elif self.lam is not None:
            raise ValueError(f"{self.kind.value} takes no discount factor")

    def __str__(self):
        if self.kind is AggregatorKind.DSUM:
            return f"DSUM {self.lam.numerator}/{self.lam.denominator}"
        return self.kind.value


@dataclass(frozen=True)
class Lasso:
    """Ultimately periodic sequence prefix . cycle^omega.

    Instantiated at symbols (words), vertex/state ids (runs and paths), and
    naturals (cost sequences).
    """

    prefix: tuple
    cycle: tuple

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "cycle", tuple(self.cycle))
        if not self.cycle:
            raise ValueError("lasso cycle must be non-empty")

    def at(self, i: int):
        if i < len(self.prefix):
            return self.prefix[i]
        return self.cycle[(i - len(self.prefix)) % len(self.cycle)]

    def unroll(self, n: int) -> tuple:
        return tuple(self.at(i) for i in range(n))

    def __str__(self):
        p = ",".join(str(x) for x in self.prefix)
        c = ",".join(str(x) for x in self.cycle)
        return f"{p}|{c}"


@dataclass
class KripkeStructure:
    """Finite transition system with one alphabet letter per state.

    Traces are infinite, so every state must have at least one successor
    (checked by :func:`validate`).
    """

    states: frozenset
    transitions: frozenset  # of (src, dst)
    initial: frozenset
    propositions: frozenset
    labeling: Mapping[str, str]

    def successors(self, s) -> list:
        return sorted(d for (a, d) in self.transitions if a == s)


@dataclass
class NBA:
    """Nondeterministic Buchi automaton."""

    states: frozenset
    alphabet: frozenset
    initial: frozenset
    accepting: frozenset
    transitions: frozenset  # of (src, symbol, dst)

    def successors(self, q, sym) -> list:
        return sorted(d for (s, a, d) in self.transitions if s == q and a == sym)

    def moves_from(self, q) -> list:
        return sorted((a, d) for (s, a, d) in self.transitions if s == q)


@dataclass(frozen=True, order=True)
class RMTransition:
    src: str
    inp: str
    dst: str
    out: Tuple[str, ...]  # output word, may be empty (epsilon)
    cost: int


@dataclass
class RepairMachine:
    """Weighted nondeterministic Buchi transducer plus a cost aggregator."""

    states: frozenset
    input_alphabet: frozenset
    output_alphabet: frozenset
    initial: frozenset
    accepting: frozenset
    transitions: frozenset  # of RMTransition
    aggregator: Aggregator

    def transitions_from(self, q, sym=None) -> list:
        if sym is None:
            return sorted(t for t in self.transitions if t.src == q)
        return sorted(t for t in self.transitions if t.src == q and t.inp == sym)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    location: str
    message: str


@dataclass
class Diagnostics:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def error(self, code, location, message):
        self.errors.append(Diagnostic(code, location, message))

    def warn(self, code, location, message):
        self.warnings.append(Diagnostic(code, location, message))


def _dsum_finite(costs: Sequence, lam: Fraction) -> Fraction:
    """Discounted sum of a finite sequence; the first cost is undiscounted."""
    total = Fraction(0)
    power = Fraction(1)
    for c in costs:
        total += power * c
        power *= lam
    return total


def eval_aggregator(agg: Aggregator, costs: Lasso) -> Fraction:
    """Exact value of an aggregator on an ultimately periodic cost sequence.

    DSum uses the closed form DSum(prefix) + lam^|prefix| DSum(cycle) / (1 -
    lam^|cycle|); Mean is the cycle mean (the limsup of prefix averages of an
    ultimately periodic sequence equals the cycle mean); Sup ranges over
    prefix and cycle, LimSup over the cycle only.
    """
    kind = agg.kind
    if kind is AggregatorKind.DSUM:
        lam = agg.lam
        head = _dsum_finite(costs.prefix, lam)
        cyc = _dsum_finite(costs.cycle, lam)
        return head + lam ** len(costs.prefix) * cyc / (1 - lam ** len(costs.cycle))
    if kind is AggregatorKind.MEAN:
        return Fraction(sum(costs.cycle), len(costs.cycle))
    if kind is AggregatorKind.SUP:
        return Fraction(max(itertools.chain(costs.prefix, costs.cycle)))
    if kind is AggregatorKind.LIMSUP:
        return Fraction(max(costs.cycle))
    raise ValueError(f"unknown aggregator kind {kind}")


_FRESH_INIT = "__init"


def kripke_to_nba(k: KripkeStructure) -> NBA:
    """NBA accepting exactly the traces of ``k``.

    A fresh initial state reads the label of each initial Kripke state; every
    state is accepting since all infinite paths of ``k`` are traces.
    """
    diag = validate(k)
    if not diag.ok:
        raise ModelError(diag)
    init = _FRESH_INIT
    while init in k.states:
        init += "_"
    states = frozenset(k.states) | {init}
    trans = set()
    for s0 in k.initial:
        trans.add((init, k.labeling[s0], s0))
    for (s, s2) in k.transitions:
        trans.add((s, k.labeling[s2], s2))
    return NBA(
        states=states,
        alphabet=frozenset(k.labeling[s] for s in k.states),
        initial=frozenset({init}),
        accepting=states,
        transitions=frozenset(trans),
    )


class ModelError(Exception):
    """Raised when a structure fails validation."""

    def __init__(self, diagnostics: Diagnostics):
        self.diagnostics = diagnostics
        msgs = "; ".join(f"{d.code}@{d.location}: {d.message}" for d in diagnostics.errors)
        super().__init__(msgs)


def lasso_membership(a: NBA, w: Lasso) -> bool:
    """Decide prefix . cycle^omega in L(a).

    Searches the product of ``a`` with the lasso positions for a reachable
    cycle through an accepting state; any such cycle necessarily stays inside
    the periodic part.
    """
    for sym in itertools.chain(w.prefix, w.cycle):
        if sym not in a.alphabet:
            raise ValueError(f"symbol {sym!r} not in automaton alphabet")
    p, c = len(w.prefix), len(w.cycle)
    total = p + c

    def step(pos):
        return pos + 1 if pos + 1 < total else p

    def letter(pos):
        return w.prefix[pos] if pos < p else w.cycle[pos - p]

    # reachable product nodes
    start = {(q, 0 if p else 0) for q in a.initial}
    seen = set(start)
    frontier = list(start)
    succ = {}
    while frontier:
        q, pos = frontier.pop()
        nxt = [(q2, step(pos)) for q2 in a.successors(q, letter(pos))]
        succ[(q, pos)] = nxt
        for node in nxt:
            if node not in seen:
                seen.add(node)
                frontier.append(node)
    # accepting node on a cycle (reaches itself)
    for node in sorted(seen):
        q, pos = node
        if q not in a.accepting:
            continue
        stack = list(succ.get(node, ()))
        visited = set()
        while stack:
            cur = stack.pop()
            if cur == node:
                return True
            if cur in visited:
                continue
            visited.add(cur)
            stack.extend(succ.get(cur, ()))
    return False


def validate(x: Union[KripkeStructure, NBA, RepairMachine]) -> Diagnostics:
    """Check all structural invariants; empty errors iff well-formed."""
    d = Diagnostics()
    if isinstance(x, KripkeStructure):
        _validate_kripke(x, d)
    elif isinstance(x, NBA):
        _validate_nba(x, d)
    elif isinstance(x, RepairMachine):
        _validate_rm(x, d)
    else:
        raise TypeError(f"cannot validate {type(x).__name__}")
    return d


def _validate_kripke(k: KripkeStructure, d: Diagnostics):
    for s in k.initial:
        if s not in k.states:
            d.error("BAD_INITIAL", s, "initial state not declared")
    if not k.initial:
        d.error("BAD_INITIAL", "-", "no initial state")
    for (a, b) in k.transitions:
        for s in (a, b):
            if s not in k.states:
                d.error("BAD_EDGE", f"{a}->{b}", f"endpoint {s} not declared")
    srcs = {a for (a, _) in k.transitions}
    for s in sorted(k.states):
        if s not in srcs:
            d.error("DEAD_END", s, "state has no successor; traces must be infinite")
        if s not in k.labeling:
            d.error("BAD_LABEL", s, "state has no label")
    for s, sym in k.labeling.items():
        if sym not in k.propositions:
            d.error("BAD_LABEL", s, f"label {sym} not a declared symbol")


def _validate_nba(a: NBA, d: Diagnostics):
    for s in a.initial:
        if s not in a.states:
            d.error("BAD_INITIAL", s, "initial state not declared")
    for s in a.accepting:
        if s not in a.states:
            d.error("BAD_ACCEPTING", s, "accepting state not declared")
    for (p, sym, q) in a.transitions:
        if p not in a.states or q not in a.states:
            d.error("BAD_EDGE", f"{p}-{sym}->{q}", "endpoint not declared")
        if sym not in a.alphabet:
            d.error("BAD_SYMBOL", f"{p}-{sym}->{q}", f"symbol {sym} not in alphabet")


def _validate_rm(t: RepairMachine, d: Diagnostics):
    for s in t.initial:
        if s not in t.states:
            d.error("BAD_INITIAL", s, "initial state not declared")
    for s in t.accepting:
        if s not in t.states:
            d.error("BAD_ACCEPTING", s, "accepting state not declared")
    for tr in sorted(t.transitions):
        loc = f"{tr.src}-{tr.inp}->{tr.dst}"
        if tr.src not in t.states or tr.dst not in t.states:
            d.error("BAD_EDGE", loc, "endpoint not declared")
        if tr.inp not in t.input_alphabet:
            d.error("BAD_SYMBOL", loc, f"input symbol {tr.inp} unknown")
        for sym in tr.out:
            if sym not in t.output_alphabet:
                d.error("BAD_SYMBOL", loc, f"output symbol {sym} unknown")
        if tr.cost < 0:
            d.error("NEGATIVE_COST", loc, f"cost {tr.cost} is negative")
    if t.aggregator.kind is AggregatorKind.DSUM and not (0 < t.aggregator.lam < 1):
        d.error("BAD_LAMBDA", "-", "discount factor must lie in (0, 1)")
