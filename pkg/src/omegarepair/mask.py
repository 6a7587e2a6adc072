"""Mask synthesis: the omega-regular set of traces that stay safe under all
cost-bounded adversarial rewritings.

For the discounted aggregator the bad set is approximated from below by a
chain of prefix-danger automata that stabilizes at a computable depth when
the threshold is isolated; for Sup/LimSup the bad set is a weight-restricted
automaton and the mask follows by complementation.  The Mean aggregator is
refused (mask synthesis for it is undecidable).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import NBA, AggregatorKind, KripkeStructure, RepairMachine, \
    kripke_to_nba, lasso_membership
from .graphutil import reachable_from, reaches, tarjan_scc
from .product import output_product, restrict_domain

DEFAULT_COMPLEMENT_LIMIT = 12


class MaskError(Exception):
    def __init__(self, code: str, detail: str = ""):
        self.code = code
        super().__init__(f"{code}{': ' + detail if detail else ''}")


@dataclass
class SupAutomaton:
    """Automaton with weighted transitions; the value of a word is the
    minimum over accepting runs of the supremum of traversed weights."""

    states: frozenset
    alphabet: frozenset
    initial: frozenset
    accepting: frozenset
    transitions: frozenset  # of (src, sym, dst, weight)

    def restricted_nba(self, bound=None) -> NBA:
        return NBA(
            states=self.states,
            alphabet=self.alphabet,
            initial=self.initial,
            accepting=self.accepting,
            transitions=frozenset(
                (q, s, q2) for (q, s, q2, w) in self.transitions
                if bound is None or w <= bound),
        )

    def is_deterministic(self) -> bool:
        if len(self.initial) > 1:
            return False
        seen = set()
        for (q, s, _, _) in self.transitions:
            if (q, s) in seen:
                return False
            seen.add((q, s))
        return True


# ---------------------------------------------------------------------------
# Trimming and projections


def _lasso_capable(states, succ, accepting):
    """States on a path to a cycle through an accepting state."""
    comps, _ = tarjan_scc(states, succ)
    good = set()
    for comp in comps:
        cyclic = len(comp) > 1 or any(v in succ.get(v, ()) for v in comp)
        if cyclic and comp & set(accepting):
            good |= comp
    return reaches(good, states, succ)


def trim_rm(t: RepairMachine) -> RepairMachine:
    """Restrict to states reachable from the initial states and lying on a
    path to an accepting cycle."""
    succ = {q: [] for q in t.states}
    for tr in t.transitions:
        succ[tr.src].append(tr.dst)
    keep = reachable_from(t.initial, succ) & _lasso_capable(
        t.states, succ, t.accepting)
    return RepairMachine(
        states=frozenset(keep),
        input_alphabet=t.input_alphabet,
        output_alphabet=t.output_alphabet,
        initial=t.initial & keep,
        accepting=t.accepting & keep,
        transitions=frozenset(tr for tr in t.transitions
                              if tr.src in keep and tr.dst in keep),
        aggregator=t.aggregator,
    )


def trim_nba(a: NBA) -> NBA:
    succ = {q: [] for q in a.states}
    for (q, _, q2) in a.transitions:
        succ[q].append(q2)
    keep = reachable_from(a.initial, succ) & _lasso_capable(
        a.states, succ, a.accepting)
    return NBA(
        states=frozenset(keep),
        alphabet=a.alphabet,
        initial=a.initial & keep,
        accepting=a.accepting & keep,
        transitions=frozenset((q, s, q2) for (q, s, q2) in a.transitions
                              if q in keep and q2 in keep),
    )


def rm_domain_nba(t: RepairMachine) -> NBA:
    """Input projection: NBA over the input alphabet accepting dom(t)."""
    return NBA(
        states=t.states,
        alphabet=t.input_alphabet,
        initial=t.initial,
        accepting=t.accepting,
        transitions=frozenset((tr.src, tr.inp, tr.dst) for tr in t.transitions),
    )


def rm_to_sup_automaton(t: RepairMachine) -> SupAutomaton:
    """Input projection keeping per-transition costs as weights."""
    return SupAutomaton(
        states=t.states,
        alphabet=t.input_alphabet,
        initial=t.initial,
        accepting=t.accepting,
        transitions=frozenset(
            (tr.src, tr.inp, tr.dst, tr.cost) for tr in t.transitions),
    )


# ---------------------------------------------------------------------------
# Discounted-sum mask: danger-layer automata


def discount_tail_bound(lam: Fraction, wmax: int, m: int) -> Fraction:
    return lam ** m * Fraction(wmax) / (1 - lam)


def dsum_mask_depth(lam: Fraction, wmax: int, eps: Fraction) -> int:
    """Smallest depth m with tail bound lam^m * wmax / (1-lam) <= eps/2."""
    if wmax == 0:
        return 0
    m = 0
    while discount_tail_bound(lam, wmax, m) > eps / 2:
        m += 1
    return m


def _empty_nba(alphabet) -> NBA:
    return NBA(frozenset(), frozenset(alphabet), frozenset(), frozenset(),
               frozenset())


def dsum_mask_bad_nba(tq: RepairMachine, a: NBA, tau: Fraction, eps: Fraction,
                      n="auto") -> NBA:
    """NBA of inputs with a cheap bad rewriting, via the depth-``n`` danger
    construction.

    A length-``n`` partial run of the trimmed output-synchronized machine is
    dangerous when its exact discounted prefix cost is at most tau minus the
    worst-case continuation bound; dangerous runs connect into an
    input-projected copy whose Buchi condition supplies the continuation.
    At the automatic depth this recognizes the bad set exactly whenever tau
    is eps-isolated.
    """
    if tq.aggregator.kind is not AggregatorKind.DSUM:
        raise MaskError("BAD_AGGREGATOR", "danger construction needs DSUM")
    if eps <= 0:
        raise MaskError("BAD_EPSILON", "epsilon must be positive")
    lam = tq.aggregator.lam
    t2 = trim_rm(output_product(tq, a))
    if not t2.initial:
        return _empty_nba(tq.input_alphabet)
    wmax = max((tr.cost for tr in t2.transitions), default=0)
    if n == "auto":
        n = dsum_mask_depth(lam, wmax, eps)
    copy_states = {q: f"c${q}" for q in t2.states}
    proj = [(tr.src, tr.inp, tr.dst, tr.cost) for tr in sorted(t2.transitions)]
    copy_trans = {(copy_states[q], s, copy_states[q2]) for (q, s, q2, _) in proj}
    if n == 0:
        if discount_tail_bound(lam, wmax, 0) <= tau:
            return NBA(
                states=frozenset(copy_states.values()),
                alphabet=frozenset(tq.input_alphabet),
                initial=frozenset(copy_states[q] for q in t2.initial),
                accepting=frozenset(copy_states[q] for q in t2.accepting),
                transitions=frozenset(copy_trans),
            )
        return _empty_nba(tq.input_alphabet)
    bn = discount_tail_bound(lam, wmax, n)

    def danger_name(d, q, cost):
        return f"d{d}${q}${cost.numerator}/{cost.denominator}"

    layer = {(q, Fraction(0)) for q in t2.initial}
    states = {danger_name(0, q, c) for (q, c) in layer}
    transitions = set(copy_trans)
    used_copy = set()
    for depth in range(n):
        nxt = set()
        for (q, cost) in layer:
            src = danger_name(depth, q, cost)
            for (q0, sym, q2, c) in proj:
                if q0 != q:
                    continue
                cost2 = cost + lam ** depth * c
                if depth + 1 < n:
                    nxt.add((q2, cost2))
                    transitions.add((src, sym, danger_name(depth + 1, q2, cost2)))
                elif cost2 <= tau - bn:
                    transitions.add((src, sym, copy_states[q2]))
                    used_copy.add(q2)
        layer = nxt
        states |= {danger_name(depth + 1, q, c) for (q, c) in layer if depth + 1 < n}
    return NBA(
        states=frozenset(states) | frozenset(copy_states.values()),
        alphabet=frozenset(tq.input_alphabet),
        initial=frozenset(danger_name(0, q, Fraction(0)) for q in t2.initial),
        accepting=frozenset(copy_states[q] for q in t2.accepting),
        transitions=frozenset(transitions),
    )


@dataclass
class MaskChainReport:
    n_star: int
    upto: int
    inclusions_ok: bool
    stabilized_at: Optional[int]
    violations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)


def dsum_mask_chain_check(tq: RepairMachine, a: NBA, tau: Fraction,
                          eps: Fraction, upto: int, samples,
                          budget=None) -> MaskChainReport:
    """Build the danger chain up to ``upto`` and check, on the sampled
    lassos, that memberships are monotone in the depth; warns NOT_ISOLATED
    when a sampled rewriting cost lands inside (tau - eps, tau + eps)."""
    from .oracle import OracleBudget, accepting_run_costs

    lam = tq.aggregator.lam
    t2 = trim_rm(output_product(tq, a))
    wmax = max((tr.cost for tr in t2.transitions), default=0)
    n_star = dsum_mask_depth(lam, wmax, eps)
    autos = [dsum_mask_bad_nba(tq, a, tau, eps, n=i) for i in range(upto + 1)]
    report = MaskChainReport(n_star=n_star, upto=upto, inclusions_ok=True,
                             stabilized_at=None)
    vectors = []
    for w in samples:
        member = [lasso_membership(autos[i], w) for i in range(upto + 1)]
        vectors.append(member)
        for i in range(upto):
            if member[i] and not member[i + 1]:
                report.inclusions_ok = False
                report.violations.append((w, i))
        for cost in accepting_run_costs(t2, w, budget or OracleBudget()):
            if tau - eps < cost < tau + eps:
                report.warnings.append(("NOT_ISOLATED", w, cost))
    for i in range(upto + 1):
        if all(vec[i] == vec[upto] for vec in vectors):
            report.stabilized_at = i
            break
    return report


# ---------------------------------------------------------------------------
# Complementation and boolean combinations


def complement_limit() -> int:
    return int(os.environ.get("OMEGAREPAIR_COMPLEMENT_LIMIT",
                              str(DEFAULT_COMPLEMENT_LIMIT)))


def _universal_nba(alphabet) -> NBA:
    return NBA(
        states=frozenset({"u"}),
        alphabet=frozenset(alphabet),
        initial=frozenset({"u"}),
        accepting=frozenset({"u"}),
        transitions=frozenset(("u", s, "u") for s in alphabet),
    )


_MONOID_CAP = 4096


def _profile_monoid(a: NBA):
    """Transition-profile monoid of the automaton.

    A profile maps each state pair (q, q2) to -1 (no path), 0 (a path), or
    1 (a path through an accepting state, endpoints included); profiles
    compose like max-plus matrix products.  Returns (generators by symbol,
    the reachable monoid closure including the identity)."""
    qs = sorted(a.states)
    idx = {q: i for i, q in enumerate(qs)}
    n = len(qs)
    acc = [q in a.accepting for q in qs]

    gen = {}
    for s in sorted(a.alphabet):
        m = [[-1] * n for _ in range(n)]
        for (q, sym, q2) in a.transitions:
            if sym == s:
                i, j = idx[q], idx[q2]
                m[i][j] = max(m[i][j], 1 if acc[i] or acc[j] else 0)
        gen[s] = tuple(tuple(row) for row in m)

    def mul(x, y):
        out = []
        for i in range(n):
            row = []
            xi = x[i]
            for j in range(n):
                best = -1
                for p in range(n):
                    if xi[p] >= 0 and y[p][j] >= 0:
                        v = max(xi[p], y[p][j])
                        if v > best:
                            best = v
                            if best == 1:
                                break
                row.append(best)
            out.append(tuple(row))
        return tuple(out)

    ident = tuple(tuple(0 if i == j else -1 for j in range(n))
                  for i in range(n))
    monoid = {ident} | set(gen.values())
    frontier = list(monoid)
    while frontier:
        m = frontier.pop()
        for g in gen.values():
            p = mul(m, g)
            if p not in monoid:
                if len(monoid) >= _MONOID_CAP:
                    raise MaskError("SIZE_LIMIT",
                                    "profile monoid exceeds the "
                                    "complementation cap")
                monoid.add(p)
                frontier.append(p)
    return qs, idx, gen, ident, mul, monoid


def complement_nba(a: NBA) -> NBA:
    """Complementation through the transition-profile monoid: the complement
    is the union of [m1][m2]^w over linked idempotent profile pairs whose
    every initial-state path/cycle combination misses acceptance.  Exact but
    exponential, gated by a state bound (override with
    OMEGAREPAIR_COMPLEMENT_LIMIT)."""
    if len(a.states) > complement_limit():
        raise MaskError("SIZE_LIMIT",
                        f"{len(a.states)} states exceed the complementation gate")
    a = trim_nba(a)
    if not a.initial or not a.accepting:
        return _universal_nba(a.alphabet)
    qs, idx, gen, ident, mul, monoid = _profile_monoid(a)
    init_idx = [idx[q] for q in sorted(a.initial)]
    n = len(qs)

    def rejecting(m1, m2):
        return not any(m1[i][j] >= 0 and m2[j][j] == 1
                       for i in init_idx for j in range(n))

    idempotents = [m for m in monoid if mul(m, m) == m]
    links = {}  # prefix profile -> idempotent block profiles it can enter
    for m1 in monoid:
        opts = [m2 for m2 in idempotents
                if mul(m1, m2) == m1 and rejecting(m1, m2)]
        if opts:
            links[m1] = opts

    mnames = {m: f"m{i}" for i, m in enumerate(sorted(monoid))}

    def pname(m):
        return f"p:{mnames[m]}"

    def bname(m2, r, mark):
        return f"b{'!' if mark else ''}:{mnames[m2]}:{mnames[r]}"

    states = set()
    transitions = set()
    initial = pname(ident)
    frontier = [("p", ident)]
    seen = {("p", ident)}

    def push(st):
        if st not in seen:
            seen.add(st)
            frontier.append(st)

    while frontier:
        st = frontier.pop()
        if st[0] == "p":
            _, m = st
            src = pname(m)
            states.add(src)
            for s, g in gen.items():
                nxt = mul(m, g)
                transitions.add((src, s, pname(nxt)))
                push(("p", nxt))
                # the block phase may start here: the first block opens with
                # this symbol, the prefix keeps profile m
                for m2 in links.get(m, ()):
                    transitions.add((src, s, bname(m2, g, False)))
                    push(("b", m2, g, False))
        else:
            _, m2, r, mark = st
            src = bname(m2, r, mark)
            states.add(src)
            for s, g in gen.items():
                transitions.add((src, s, bname(m2, mul(r, g), False)))
                push(("b", m2, mul(r, g), False))
                if r == m2:
                    # close the block and open the next one
                    transitions.add((src, s, bname(m2, g, True)))
                    push(("b", m2, g, True))

    accepting = frozenset(s for s in states if s.startswith("b!"))
    return trim_nba(NBA(
        states=frozenset(states),
        alphabet=a.alphabet,
        initial=frozenset({initial}),
        accepting=accepting,
        transitions=frozenset(transitions),
    ))


def intersect_nba(a: NBA, b: NBA) -> NBA:
    """Two-flag Buchi intersection over the common alphabet."""
    alphabet = frozenset(a.alphabet) & frozenset(b.alphabet)
    states = set()
    transitions = set()

    def name(x, y, i):
        return f"{x}&{y}&{i}"

    for (x, s, x2) in a.transitions:
        if s not in alphabet:
            continue
        for (y, sy, y2) in b.transitions:
            if sy != s:
                continue
            for i in (1, 2):
                if i == 1:
                    i2 = 2 if x2 in a.accepting else 1
                else:
                    i2 = 1 if y in b.accepting else 2
                transitions.add((name(x, y, i), s, name(x2, y2, i2)))
                states.add(name(x, y, i))
                states.add(name(x2, y2, i2))
    initial = frozenset(name(x, y, 1) for x in a.initial for y in b.initial)
    accepting = frozenset(name(x, y, 2) for x in a.states for y in b.accepting)
    return NBA(
        states=frozenset(states) | initial,
        alphabet=alphabet,
        initial=initial,
        accepting=accepting & (frozenset(states) | initial),
        transitions=frozenset(transitions),
    )


# ---------------------------------------------------------------------------
# Sup / LimSup masks


def sup_gt_threshold_nba(u: SupAutomaton, tau: Fraction) -> NBA:
    """Two-copy NBA accepting the words whose (deterministic) run traverses
    some weight above tau; copy 1 is entered on the first such weight."""
    if not u.is_deterministic():
        raise MaskError("NONDET_INPUT",
                        "threshold construction requires a deterministic automaton")

    def name(q, i):
        return f"{q}#{i}"

    transitions = set()
    for (q, s, q2, w) in u.transitions:
        if w <= tau:
            transitions.add((name(q, 0), s, name(q2, 0)))
        else:
            transitions.add((name(q, 0), s, name(q2, 1)))
        transitions.add((name(q, 1), s, name(q2, 1)))
    states = frozenset(name(q, i) for q in u.states for i in (0, 1))
    return NBA(
        states=states,
        alphabet=u.alphabet,
        initial=frozenset(name(q, 0) for q in u.initial),
        accepting=frozenset(name(q, 1) for q in u.accepting),
        transitions=frozenset(transitions),
    )


def sup_mask(tq: RepairMachine, a: NBA, tau: Fraction) -> NBA:
    """Mask for the Sup aggregator: inputs in dom(tq) admitting no accepting
    rewriting into L(a) whose every step costs at most tau."""
    u = rm_to_sup_automaton(trim_rm(output_product(tq, a)))
    bad = trim_nba(u.restricted_nba(tau))
    return trim_nba(intersect_nba(rm_domain_nba(trim_rm(tq)),
                                  complement_nba(bad)))


def limsup_mask(tq: RepairMachine, a: NBA, tau: Fraction) -> NBA:
    """Mask for the LimSup aggregator: only costs occurring infinitely often
    are bounded, so the bad automaton guesses the point after which all
    weights stay at most tau and tracks acceptance from there on."""
    u = rm_to_sup_automaton(trim_rm(output_product(tq, a)))

    def name(q, phase):
        return f"{q}@{phase}"

    transitions = set()
    for (q, s, q2, w) in u.transitions:
        transitions.add((name(q, 1), s, name(q2, 1)))
        if w <= tau:
            transitions.add((name(q, 1), s, name(q2, 2)))
            transitions.add((name(q, 2), s, name(q2, 2)))
    bad = trim_nba(NBA(
        states=frozenset(name(q, i) for q in u.states for i in (1, 2)),
        alphabet=u.alphabet,
        initial=frozenset(name(q, 1) for q in u.initial),
        accepting=frozenset(name(q, 2) for q in u.accepting),
        transitions=frozenset(transitions),
    ))
    return trim_nba(intersect_nba(rm_domain_nba(trim_rm(tq)),
                                  complement_nba(bad)))


# ---------------------------------------------------------------------------
# End-to-end pipeline


def mask_synthesize(k: KripkeStructure, t: RepairMachine, bad_spec: NBA,
                    tau: Fraction, eps: Optional[Fraction] = None,
                    depth="auto") -> NBA:
    """Full mask pipeline: restrict the machine to the traces of ``k`` and
    dispatch on the aggregator.  The Mean aggregator is refused."""
    kind = t.aggregator.kind
    if kind is AggregatorKind.MEAN:
        raise MaskError("UNDECIDABLE_MEAN_MASK",
                        "mask synthesis for the Mean aggregator is undecidable")
    n = kripke_to_nba(k)
    if frozenset(n.alphabet) != frozenset(t.input_alphabet):
        n = NBA(n.states, frozenset(t.input_alphabet), n.initial,
                n.accepting, n.transitions)
    tq = trim_rm(restrict_domain(t, n))
    if kind is AggregatorKind.DSUM:
        if eps is None or eps <= 0:
            raise MaskError("BAD_EPSILON", "DSUM mask needs a positive epsilon")
        bad = dsum_mask_bad_nba(tq, bad_spec, tau, eps, n=depth)
        return trim_nba(intersect_nba(rm_domain_nba(tq), complement_nba(bad)))
    if kind is AggregatorKind.SUP:
        return sup_mask(tq, bad_spec, tau)
    return limsup_mask(tq, bad_spec, tau)
