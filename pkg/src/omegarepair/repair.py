"""Repair threshold synthesis and epsilon-optimal strategy extraction.

The pipeline builds the synchronized product and its arena, solves the Buchi
game for the rewriting player (Min), restricts to Min's winning region, and
then dispatches on the aggregator: discounted game, certified mean-payoff
fixpoint, or bottleneck edge-removal search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import NBA, AggregatorKind, KripkeStructure, Lasso, RepairMachine
from .product import GameArena, ProductGraph, build_arena, build_product
from .results import (Attainment, ExitKind, ExitRule, FiniteMemoryStrategy,
                      MemoryClass, Orientation, StrategyMode, ThresholdResult)
from .solvers import (MAX, MIN, solve_buchi_game, solve_dsum_game,
                      solve_mean_game, _attractor)
from .graphutil import reachable_from, reaches


class RepairError(Exception):
    def __init__(self, code: str, detail: str = ""):
        self.code = code
        super().__init__(f"{code}{': ' + detail if detail else ''}")


@dataclass
class RepairPipeline:
    """Intermediate artifacts shared by threshold and strategy extraction."""

    product: ProductGraph
    arena: GameArena
    winning: frozenset
    subarena: Optional[GameArena]
    buchi_strategy: dict
    feasible: bool


def prepare(k: KripkeStructure, t: RepairMachine, b: NBA) -> RepairPipeline:
    g = build_product(k, t, b)
    arena = build_arena(g)
    bg = solve_buchi_game(arena, MIN)
    feasible = arena.initial <= bg.min_winning
    sub = arena.restricted(bg.min_winning) if feasible else None
    return RepairPipeline(g, arena, bg.min_winning, sub,
                          dict(bg.min_strategy), feasible)


def repair_threshold(k: KripkeStructure, t: RepairMachine, b: NBA) -> ThresholdResult:
    """Least threshold tau* such that every trace of ``k`` can be rewritten
    by ``t`` into L(``b``) at aggregated cost within tau*."""
    pipe = prepare(k, t, b)
    if not pipe.feasible:
        return ThresholdResult(None, None, None, Orientation.REPAIR)
    agg = t.aggregator
    sub = pipe.subarena
    if agg.kind is AggregatorKind.DSUM:
        vm = solve_dsum_game(sub, agg.lam)
        value = max(vm.values[v] for v in sub.initial)
        return ThresholdResult(value, Attainment.INFIMUM_ONLY,
                               MemoryClass.FINITE, Orientation.REPAIR)
    if agg.kind is AggregatorKind.MEAN:
        value = _mean_repair_value(sub)
        return ThresholdResult(value, Attainment.ATTAINED,
                               MemoryClass.INFINITE_FOR_EXACT, Orientation.REPAIR)
    mode = "SUP" if agg.kind is AggregatorKind.SUP else "LIMSUP"
    value, _ = _sup_removal(sub, mode)
    return ThresholdResult(value, Attainment.ATTAINED,
                           MemoryClass.POSITIONAL, Orientation.REPAIR)


def sup_threshold_by_edge_removal(arena: GameArena, mode: str) -> ThresholdResult:
    """Descending edge-class removal search for Sup/LimSup repair.

    Requires Min to win the Buchi game from every initial vertex; for LIMSUP
    only edges lying on some accepting cycle are removable.
    """
    bg = solve_buchi_game(arena, MIN)
    if not arena.initial <= bg.min_winning:
        raise RepairError("INFEASIBLE", "Min does not win the Buchi game")
    value, _ = _sup_removal(arena.restricted(bg.min_winning), mode)
    return ThresholdResult(value, Attainment.ATTAINED,
                           MemoryClass.POSITIONAL, Orientation.REPAIR)


def _sup_removal(sub: GameArena, mode: str):
    """(tau*, surviving edge set) for the bottleneck search on a winning
    subarena."""
    edges = set(sub.edges)
    classes = sorted({e.weight for e in sub.edges if e.weight > 0}, reverse=True)
    for w in classes:
        cls = {e for e in edges if e.weight == w}
        if mode == "LIMSUP":
            cls = {e for e in cls if _on_accepting_cycle(sub, edges, e)}
            if not cls:
                continue
        trial = edges - cls
        arena2 = sub.restricted(sub.vertices, allowed_edges=trial)
        bg = solve_buchi_game(arena2, MIN)
        if not sub.initial <= bg.min_winning:
            return Fraction(w), edges
        edges = trial
    return Fraction(0), edges


def _on_accepting_cycle(sub: GameArena, edges, e) -> bool:
    succ = {v: [] for v in sub.vertices}
    for x in edges:
        succ[x.src].append(x.dst)
    fwd = reachable_from({e.dst}, succ)
    finals = fwd & sub.final
    if not finals:
        return False
    back = reaches({e.src}, sub.vertices, succ)
    return bool(finals & back)


# ---------------------------------------------------------------------------
# Mean repair: achievability fixpoint over candidate cycle means


def _max_closure(sub: GameArena, keep):
    """Largest subset of ``keep`` that Max cannot leave and in which every
    kept Min vertex retains a move."""
    emap = sub.edge_map()

    def owner(v):
        return MIN if v in sub.min_vertices else MAX

    complement = set(sub.vertices) - set(keep)
    attr, _ = _attractor(complement, MAX, sub.vertices, emap, owner)
    return set(keep) - attr


def _achievable_mean(sub: GameArena, c: Fraction):
    """Does Min have a strategy ensuring the Buchi objective and limit mean
    at most ``c`` from every vertex of the returned set?  Returns the stable
    set together with the mean-game solution and Buchi strategy on it."""
    keep = set(sub.vertices)
    while True:
        keep = _max_closure(sub, keep)
        if not keep:
            return set(), None, None
        arena2 = sub.restricted(keep)
        bg = solve_buchi_game(arena2, MIN)
        if bg.min_winning != frozenset(keep):
            keep = set(bg.min_winning)
            continue
        vm = solve_mean_game(arena2)
        bad = {v for v in keep if vm.values[v] > c}
        if not bad:
            return keep, vm, bg.min_strategy
        keep -= bad


def _mean_repair_value(sub: GameArena) -> Fraction:
    vm = solve_mean_game(sub)
    c0 = max(vm.values[v] for v in sub.initial)
    keep, _, _ = _achievable_mean(sub, c0)
    if sub.initial <= keep:
        return c0
    wmax = max((e.weight for e in sub.edges), default=0)
    n = max(1, len(sub.min_vertices))
    candidates = sorted({Fraction(d, m) for m in range(1, n + 1)
                         for d in range(0, m * wmax + 1)})
    candidates = [c for c in candidates if c > c0]
    lo, hi = 0, len(candidates) - 1
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        keep, _, _ = _achievable_mean(sub, candidates[mid])
        if sub.initial <= keep:
            best = candidates[mid]
            hi = mid - 1
        else:
            lo = mid + 1
    if best is None:
        raise RepairError("INFEASIBLE", "no achievable mean threshold found")
    return best


# ---------------------------------------------------------------------------
# Strategy extraction


def repair_strategy(k: KripkeStructure, t: RepairMachine, b: NBA,
                    epsilon: Optional[Fraction] = None) -> FiniteMemoryStrategy:
    """Finite-memory strategy guaranteeing cost at most tau* + epsilon
    (exactly tau* for Sup/LimSup, where epsilon is ignored)."""
    pipe = prepare(k, t, b)
    if not pipe.feasible:
        raise RepairError("INFEASIBLE", "no repair exists at any threshold")
    agg = t.aggregator
    sub = pipe.subarena
    buchi_moves = {v: pipe.buchi_strategy[v]
                   for v in sub.min_vertices if v in pipe.buchi_strategy}
    if agg.kind in (AggregatorKind.DSUM, AggregatorKind.MEAN):
        if epsilon is None or epsilon <= 0:
            raise RepairError("BAD_EPSILON", "epsilon must be positive")
    if agg.kind is AggregatorKind.DSUM:
        vm = solve_dsum_game(sub, agg.lam)
        tau = max(vm.values[v] for v in sub.initial)
        wmax = max((e.weight for e in sub.edges), default=0)
        steps = _dsum_step_bound(agg.lam, wmax, epsilon)
        if steps == 0:
            modes = (StrategyMode(buchi_moves, ExitRule(ExitKind.FOREVER)),)
        else:
            modes = (
                StrategyMode(dict(vm.strategy_min),
                             ExitRule(ExitKind.AFTER_STEPS, steps=steps)),
                StrategyMode(buchi_moves, ExitRule(ExitKind.FOREVER)),
            )
        return FiniteMemoryStrategy(modes, epsilon=epsilon, guarantee=tau + epsilon)
    if agg.kind is AggregatorKind.MEAN:
        tau = _mean_repair_value(sub)
        keep, vm, buchi = _achievable_mean(sub, tau)
        wmax = max((e.weight for e in sub.edges), default=0)
        n = max(1, len(keep))
        steps = max(1, math.ceil(Fraction(4 * n * max(wmax, 1)) / epsilon)) + n
        mean_moves = {v: vm.strategy_min[v] for v in vm.strategy_min}
        buchi_moves = {v: buchi[v] for v in buchi}
        modes = (
            StrategyMode(mean_moves, ExitRule(ExitKind.AFTER_STEPS, steps=steps)),
            StrategyMode(buchi_moves, ExitRule(ExitKind.AFTER_ACCEPTING_VISIT)),
        )
        return FiniteMemoryStrategy(modes, epsilon=epsilon,
                                    guarantee=tau + epsilon, loop=True)
    mode = "SUP" if agg.kind is AggregatorKind.SUP else "LIMSUP"
    tau, edges = _sup_removal(sub, mode)
    arena2 = sub.restricted(sub.vertices, allowed_edges=edges)
    bg = solve_buchi_game(arena2, MIN)
    moves = {v: bg.min_strategy[v]
             for v in arena2.min_vertices if v in bg.min_strategy}
    return FiniteMemoryStrategy(
        (StrategyMode(moves, ExitRule(ExitKind.FOREVER)),),
        guarantee=tau)


def _dsum_step_bound(lam: Fraction, wmax: int, epsilon: Fraction) -> int:
    """Smallest k with lam^k * wmax / (1 - lam) <= epsilon."""
    if wmax == 0:
        return 0
    bound = Fraction(wmax) / (1 - lam)
    k = 0
    while bound > epsilon:
        bound *= lam
        k += 1
    return k


def simulate_strategy(arena: GameArena, strategy: FiniteMemoryStrategy,
                      max_policy: dict, start):
    """Play the strategy against a positional Max policy from ``start``.

    Returns (cost lasso, buchi_ok): the per-round weight sequence of the
    eventually-periodic play and whether its cycle visits a final vertex.
    """
    emap = arena.edge_map()
    seen = {}
    weights = []
    final_positions = []
    v, mode_i, counter = start, 0, 0
    n_modes = len(strategy.modes)

    def advance(mode_i):
        nxt = mode_i + 1
        if nxt >= n_modes:
            return 0 if strategy.loop else mode_i
        return nxt

    while True:
        mode = strategy.modes[mode_i]
        rule = mode.exit_rule
        if rule.kind is ExitKind.AFTER_ACCEPTING_VISIT and v in arena.final:
            mode_i, counter = advance(mode_i), 0
            continue
        if rule.kind is ExitKind.AFTER_ANCHOR_HITS and v == rule.anchor:
            counter += 1
            if counter >= rule.steps:
                mode_i, counter = advance(mode_i), 0
                continue
        if rule.kind is ExitKind.AFTER_STEPS and counter >= rule.steps:
            mode_i, counter = advance(mode_i), 0
            continue
        state = (v, mode_i, counter)
        if state in seen:
            j = seen[state]
            prefix = tuple(weights[:j])
            cycle = tuple(weights[j:])
            buchi_ok = any(p >= j for p in final_positions)
            return Lasso(prefix, cycle), buchi_ok
        seen[state] = len(weights)
        if v in arena.final:
            final_positions.append(len(weights))
        if v not in mode.moves:
            raise RepairError("UNPLAYABLE", f"no move at {v} in mode {mode_i}")
        mid = mode.moves[v]
        edge = next(e for e in emap[v] if e.dst == mid)
        weights.append(edge.weight)
        if mid not in max_policy:
            raise RepairError("UNPLAYABLE", f"Max policy undefined at {mid}")
        v = max_policy[mid]
        if rule.kind is ExitKind.AFTER_STEPS:
            counter += 1
