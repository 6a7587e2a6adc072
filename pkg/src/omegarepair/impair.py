"""Impair verification: single-player adversarial rewriting thresholds and
epsilon-cheap attack witnesses.

All computations run on the synchronized product pruned to its
accepting-lasso core; graph-level entry points exist so abstract weighted
graphs can be analyzed directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import NBA, Aggregator, AggregatorKind, KripkeStructure, Lasso, \
    RepairMachine, eval_aggregator
from .graphutil import bfs_path, reachable_from, shortest_cycle_through, tarjan_scc
from .product import ProductGraph, build_product
from .results import Attainment, MemoryClass, Orientation, ThresholdResult
from .solvers import karp_min_mean_cycle, min_dsum_single, \
    min_limsup_cycle, minimax_lasso_sup, prune_to_accepting_lassos


class ImpairError(Exception):
    def __init__(self, code: str, detail: str = ""):
        self.code = code
        super().__init__(f"{code}{': ' + detail if detail else ''}")


@dataclass
class ImpairWitness:
    trace: Optional[Lasso]
    rewrite: Optional[Lasso]
    run: Lasso
    cost: Fraction

    def serialize(self) -> str:
        lines = []
        if self.trace is not None:
            lines.append(f"TRACE {self.trace}")
        if self.rewrite is not None:
            lines.append(f"REWRITE {self.rewrite}")
        lines.append(f"RUN {self.run}")
        lines.append(f"COST {self.cost.numerator}/{self.cost.denominator}")
        return "\n".join(lines) + "\n"


def impair_threshold(k: KripkeStructure, t: RepairMachine, a: NBA) -> ThresholdResult:
    """Least cost at which some trace of ``k`` can be rewritten by ``t`` into
    the undesirable language L(``a``)."""
    g = build_product(k, t, a)
    return impair_threshold_graph(g, t.aggregator)


def impair_threshold_graph(g: ProductGraph, agg: Aggregator) -> ThresholdResult:
    pruned = prune_to_accepting_lassos(g)
    if not pruned.initial:
        return ThresholdResult(None, None, None, Orientation.IMPAIR)
    if agg.kind is AggregatorKind.DSUM:
        vm = min_dsum_single(pruned, agg.lam)
        value = min(vm.values[v] for v in pruned.initial)
        return ThresholdResult(value, Attainment.INFIMUM_ONLY,
                               MemoryClass.FINITE, Orientation.IMPAIR)
    if agg.kind is AggregatorKind.MEAN:
        value, _, attained = _best_mean_scc(pruned)
        if attained:
            return ThresholdResult(value, Attainment.ATTAINED,
                                   MemoryClass.POSITIONAL, Orientation.IMPAIR)
        return ThresholdResult(value, Attainment.INFIMUM_ONLY,
                               MemoryClass.INFINITE_FOR_EXACT, Orientation.IMPAIR)
    if agg.kind is AggregatorKind.SUP:
        return minimax_lasso_sup(g)
    return min_limsup_cycle(g)


def _qualifying_sccs(pruned: ProductGraph):
    """SCCs of the pruned product that contain an accepting cycle and are
    reachable from the initial vertices."""
    succ = pruned.succ_map()
    reach = reachable_from(pruned.initial, succ)
    comps, _ = tarjan_scc(pruned.vertices, succ)
    out = []
    for comp in comps:
        cyclic = len(comp) > 1 or any(v in succ.get(v, ()) for v in comp)
        if cyclic and comp & pruned.final and comp & reach:
            out.append(comp)
    return out


def _scc_edges(pruned: ProductGraph, comp):
    return [(e.src, e.dst, e.weight) for e in pruned.edges
            if e.src in comp and e.dst in comp]


def _best_mean_scc(pruned: ProductGraph):
    """(tau*, (component, Karp cycle result), attained?) over qualifying
    SCCs; attained when some minimum-mean cycle passes through a final
    vertex (checked on the tight-edge subgraph)."""
    best = None
    for comp in _qualifying_sccs(pruned):
        edges = _scc_edges(pruned, comp)
        res = karp_min_mean_cycle(sorted(comp), edges)
        if best is None or res.value < best[0]:
            attained = _tight_cycle_through_final(sorted(comp), edges,
                                                 res.value, pruned.final)
            best = (res.value, (comp, res), attained)
    if best is None:
        raise ImpairError("INFEASIBLE", "no qualifying cycle")
    return best


def _tight_cycle_through_final(vertices, edges, mu, final):
    """Whether some cycle of mean ``mu`` visits a final vertex: every
    mean-``mu`` cycle lies in the tight subgraph of the Bellman-Ford
    potentials for the reduced weights, and every tight cycle has mean
    ``mu``."""
    dist = {v: None for v in vertices}
    dist[vertices[0]] = Fraction(0)
    for _ in range(len(vertices)):
        for (u, v, w) in edges:
            if dist[u] is None:
                continue
            cand = dist[u] + w - mu
            if dist[v] is None or cand < dist[v]:
                dist[v] = cand
    tight = {v: [] for v in vertices}
    for (u, v, w) in edges:
        if dist[u] is not None and dist[v] is not None \
                and dist[u] + w - mu == dist[v]:
            tight[u].append(v)
    comps, _ = tarjan_scc(vertices, tight)
    for comp in comps:
        cyclic = len(comp) > 1 or any(v in tight.get(v, ()) for v in comp)
        if cyclic and comp & set(final):
            return True
    return False


def alternation_mean(i: int, d1: int, n1: int, d2: int, n2: int) -> Fraction:
    """Mean of round i of the cheap-cycle / accepting-return alternation:
    2^(i+1) - 1 laps of the cheap cycle followed by one accepting return."""
    reps = (1 << (i + 1)) - 1
    return Fraction(reps * d1 + i * d2, reps * n1 + i * n2)


def mean_round_index(d1: int, n1: int, d2: int, n2: int, eps: Fraction) -> int:
    """Smallest round index whose alternation mean is within eps of the
    cheap-cycle mean d1/n1."""
    target = Fraction(d1, n1)
    i = 0
    while abs(alternation_mean(i, d1, n1, d2, n2) - target) > eps:
        i += 1
    return i


def impair_witness(k: KripkeStructure, t: RepairMachine, a: NBA,
                   epsilon: Optional[Fraction] = None) -> ImpairWitness:
    g = build_product(k, t, a)
    return impair_witness_graph(g, t.aggregator, epsilon)


def impair_witness_graph(g: ProductGraph, agg: Aggregator,
                         epsilon: Optional[Fraction] = None) -> ImpairWitness:
    """Accepting product lasso of aggregated cost at most tau* + epsilon
    (exactly tau* for Sup/LimSup)."""
    pruned = prune_to_accepting_lassos(g)
    if not pruned.initial:
        raise ImpairError("INFEASIBLE", "system is safe at every threshold")
    if agg.kind in (AggregatorKind.DSUM, AggregatorKind.MEAN):
        if epsilon is None or epsilon <= 0:
            raise ImpairError("BAD_EPSILON", "epsilon must be positive")
    if agg.kind is AggregatorKind.DSUM:
        prefix, cycle = _dsum_witness_lasso(pruned, agg.lam, epsilon)
    elif agg.kind is AggregatorKind.MEAN:
        prefix, cycle = _mean_witness_lasso(pruned, epsilon)
    elif agg.kind is AggregatorKind.SUP:
        prefix, cycle = _sup_witness_lasso(pruned)
    else:
        prefix, cycle = _limsup_witness_lasso(pruned)
    return _assemble_witness(g, agg, prefix, cycle)


def _min_edge(g: ProductGraph, u, v):
    cands = [e for e in g.edges if e.src == u and e.dst == v]
    if not cands:
        raise ImpairError("INTERNAL", f"missing edge {u} -> {v}")
    return min(cands, key=lambda e: (e.weight, e))


def _assemble_witness(g: ProductGraph, agg, prefix, cycle) -> ImpairWitness:
    walk = list(prefix) + list(cycle) + [cycle[0]]
    edges = [_min_edge(g, walk[i], walk[i + 1]) for i in range(len(walk) - 1)]
    pe, ce = edges[:len(prefix)], edges[len(prefix):]
    costs = Lasso(tuple(e.weight for e in pe), tuple(e.weight for e in ce))
    cost = eval_aggregator(agg, costs)
    trace = rewrite = None
    if all(e.rm_transition is not None for e in edges) and g.kripke is not None:
        lab = g.kripke.labeling
        trace = Lasso(tuple(lab[v.kripke] for v in prefix),
                      tuple(lab[v.kripke] for v in cycle))
        out_c = tuple(sym for e in ce for sym in e.rm_transition.out)
        if not out_c:
            raise ImpairError("EPSILON_CYCLE",
                              "witness cycle produces no output letters")
        out_p = tuple(sym for e in pe for sym in e.rm_transition.out)
        rewrite = Lasso(out_p, out_c)
    return ImpairWitness(trace, rewrite,
                         Lasso(tuple(prefix), tuple(cycle)), cost)


def _accepting_cycle_targets(pruned: ProductGraph):
    succ = pruned.succ_map()
    comps, _ = tarjan_scc(pruned.vertices, succ)
    targets = set()
    for comp in comps:
        cyclic = len(comp) > 1 or any(v in succ.get(v, ()) for v in comp)
        if cyclic:
            targets |= comp & pruned.final
    return targets, succ


def _dsum_witness_lasso(pruned: ProductGraph, lam: Fraction, eps: Fraction):
    """Shortest witness within tau* + eps: follow the optimal discounted
    policy one step at a time and, after each step, try to close off with the
    nearest accepting cycle, stopping as soon as the exact cost is within the
    bound (the discounted tail shrinks geometrically, so the loop ends)."""
    vm = min_dsum_single(pruned, lam)
    v0 = min(pruned.initial, key=lambda v: (vm.values[v], v))
    tau = vm.values[v0]
    targets, succ = _accepting_cycle_targets(pruned)
    wmap = {}
    for e in pruned.edges:
        key = (e.src, e.dst)
        if key not in wmap or e.weight < wmap[key]:
            wmap[key] = e.weight
    agg = Aggregator(AggregatorKind.DSUM, lam)
    path = [v0]
    while True:
        tail = bfs_path(path[-1], targets, succ)
        full = path[:-1] + tail
        cycle = shortest_cycle_through(full[-1], succ)
        prefix, cyc = _normalize(full, cycle)
        walk = list(prefix) + list(cyc) + [cyc[0]]
        weights = [wmap[(walk[i], walk[i + 1])] for i in range(len(walk) - 1)]
        costs = Lasso(tuple(weights[:len(prefix)]), tuple(weights[len(prefix):]))
        if eval_aggregator(agg, costs) <= tau + eps:
            return prefix, cyc
        path.append(vm.strategy_min[path[-1]])


def _normalize(path_to_cycle_start, cycle):
    """Split a walk ending at the cycle start into (prefix, cycle) with the
    cycle starting where the walk ends."""
    assert path_to_cycle_start[-1] == cycle[0]
    return path_to_cycle_start[:-1], list(cycle)


def _mean_witness_lasso(pruned: ProductGraph, eps: Fraction):
    tau, (comp, res), attained = _best_mean_scc(pruned)
    succ = pruned.succ_map()
    c1 = list(res.cycle.cycle)
    c0 = c1[0]
    start = min(v for v in pruned.initial
                if c0 in reachable_from({v}, succ))
    prefix_path = bfs_path(start, {c0}, succ)
    if attained and set(c1) & pruned.final:
        return _normalize(prefix_path, c1)
    # closed accepting return: c0 -> some accepting-cycle vertex -> c0
    targets, _ = _accepting_cycle_targets(pruned)
    comp_succ = {v: [u for u in succ.get(v, ()) if u in comp] for v in comp}
    go = bfs_path(c0, targets & comp, comp_succ)
    f = go[-1]
    if f == c0:
        ret_walk = shortest_cycle_through(c0, comp_succ)
    else:
        back = bfs_path(f, {c0}, comp_succ)
        ret_walk = go[:-1] + back[:-1]
    wmap = {}
    for e in pruned.edges:
        key = (e.src, e.dst)
        if key not in wmap or e.weight < wmap[key]:
            wmap[key] = e.weight
    d1, n1 = res.total_cost, res.length
    walk_closed = ret_walk + [c0]
    d2 = sum(wmap[(walk_closed[i], walk_closed[i + 1])]
             for i in range(len(ret_walk)))
    n2 = len(ret_walk)
    i = mean_round_index(d1, n1, d2, n2, eps)
    reps = (1 << (i + 1)) - 1
    while Fraction(reps * d1 + d2, reps * n1 + n2) > tau + eps:
        reps *= 2
    cycle = c1 * reps + ret_walk
    return _normalize(prefix_path, cycle)


def _sup_witness_lasso(pruned: ProductGraph):
    res = minimax_lasso_sup(pruned)
    if res.infinite:
        raise ImpairError("INFEASIBLE")
    c = res.value
    sub = pruned.induced(pruned.vertices)
    sub.edges = tuple(e for e in pruned.edges if e.weight <= c)
    core = prune_to_accepting_lassos(sub)
    targets, succ = _accepting_cycle_targets(core)
    start = min(core.initial)
    path = bfs_path(start, targets, succ)
    f = path[-1]
    cycle = shortest_cycle_through(f, succ)
    return _normalize(path, cycle)


def _limsup_witness_lasso(pruned: ProductGraph):
    res = min_limsup_cycle(pruned)
    if res.infinite:
        raise ImpairError("INFEASIBLE")
    c = res.value
    succ_all = pruned.succ_map()
    reach = reachable_from(pruned.initial, succ_all)
    cheap_succ = {v: [e.dst for e in pruned.edges
                      if e.src == v and e.weight <= c and e.dst in reach]
                  for v in reach}
    comps, _ = tarjan_scc(reach, cheap_succ)
    targets = set()
    for comp in comps:
        cyclic = len(comp) > 1 or any(v in cheap_succ.get(v, ()) for v in comp)
        if cyclic:
            targets |= comp & pruned.final
    start = min(v for v in pruned.initial
                if targets & reachable_from({v}, succ_all))
    path = bfs_path(start, targets, succ_all)
    f = path[-1]
    cycle = shortest_cycle_through(f, cheap_succ)
    return _normalize(path, cycle)
