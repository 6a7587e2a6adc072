"""Game and graph solvers with exact rational answers.

Covers: attractor-based Buchi games with strategy extraction, pruning a
product graph to its accepting-lasso core, discounted min-max games solved by
strategy iteration in exact arithmetic, mean-payoff games solved by value
iteration with exact certification through best-response cycle analysis,
Karp's minimum mean cycle with witness extraction, and the bottleneck
(Sup/LimSup) threshold searches.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import Lasso
from .graphutil import reachable_from, reaches, tarjan_scc
from .product import GameArena, ProductGraph
from .results import Attainment, MemoryClass, Orientation, ThresholdResult

MIN = "MIN"
MAX = "MAX"


class SolverError(Exception):
    def __init__(self, code: str, detail: str = ""):
        self.code = code
        super().__init__(f"{code}{': ' + detail if detail else ''}")


@dataclass
class BuchiGameResult:
    min_winning: frozenset
    max_winning: frozenset
    min_strategy: dict  # Min-owned winning vertex -> successor
    max_strategy: dict  # Max-owned winning vertex -> successor


@dataclass
class ValueMap:
    values: dict  # vertex -> Fraction
    strategy_min: dict  # Min-owned vertex -> successor
    strategy_max: dict  # Max-owned vertex -> successor


@dataclass
class CycleResult:
    value: Fraction
    cycle: Lasso
    total_cost: int
    length: int


# ---------------------------------------------------------------------------
# Buchi games


def _attractor(targets, player, region, emap, owner):
    """Player-``player`` attractor to ``targets`` inside vertex set
    ``region``.  Returns (attractor set, rank map); rank 0 on targets.

    A vertex owned by the opponent with no successors inside the region is
    attracted vacuously (a stuck player loses).
    """
    region = set(region)
    succ_in = {v: [e.dst for e in emap.get(v, ()) if e.dst in region]
               for v in region}
    pred = {v: [] for v in region}
    for v in region:
        for w in succ_in[v]:
            pred[w].append(v)
    rank = {v: 0 for v in targets if v in region}
    # a stuck opponent vertex is attracted vacuously and seeds the fixpoint
    for v in region:
        if owner(v) != player and not succ_in[v]:
            rank.setdefault(v, 0)
    remaining = {v: len(succ_in[v]) for v in region}
    frontier = sorted(rank)
    level = 0
    while frontier:
        level += 1
        nxt = []
        for v in frontier:
            for u in pred[v]:
                if u in rank:
                    continue
                if owner(u) == player:
                    rank[u] = level
                    nxt.append(u)
                else:
                    remaining[u] -= 1
                    if remaining[u] == 0:
                        rank[u] = level
                        nxt.append(u)
        frontier = sorted(nxt)
    return set(rank), rank


def solve_buchi_game(arena: GameArena, favored: str = MIN) -> BuchiGameResult:
    """Winning regions and positional strategies for the Buchi game on the
    arena; the ``favored`` player tries to visit final vertices infinitely
    often, the opponent tries to prevent it."""
    emap = arena.edge_map()

    def owner(v):
        return MIN if v in arena.min_vertices else MAX

    opponent = MAX if favored == MIN else MIN

    def live_finals(w):
        # a final vertex owned by the favored player with no move left inside
        # the region is stuck and loses; it must not seed the attractor
        return {v for v in set(arena.final) & w
                if owner(v) != favored
                or any(e.dst in w for e in emap.get(v, ()))}

    w = set(arena.vertices)
    opp_strategy = {}
    while True:
        f = live_finals(w)
        attr, _ = _attractor(f, favored, w, emap, owner)
        trap = w - attr
        if not trap:
            break
        escape, esc_rank = _attractor(trap, opponent, w, emap, owner)
        for v in sorted(escape):
            if owner(v) != opponent or v in opp_strategy:
                continue
            succ_in_w = sorted(e.dst for e in emap.get(v, ()) if e.dst in w)
            if v in trap:
                stay = [u for u in succ_in_w if u in trap]
                target = stay if stay else [u for u in succ_in_w]
                if target:
                    opp_strategy[v] = target[0]
            else:
                down = [u for u in succ_in_w
                        if u in escape and esc_rank.get(u, 10 ** 9) < esc_rank[v]]
                if down:
                    opp_strategy[v] = down[0]
        w -= escape
    # favored player's strategy on the winning region: rank-decreasing toward
    # the final set, and from final vertices any successor staying inside
    f = live_finals(w)
    _, rank = _attractor(f, favored, w, emap, owner)
    fav_strategy = {}
    for v in sorted(w):
        if owner(v) != favored:
            continue
        succ_in_w = sorted(e.dst for e in emap.get(v, ()) if e.dst in w)
        if not succ_in_w:
            continue
        if v in f:
            fav_strategy[v] = succ_in_w[0]
        else:
            down = [u for u in succ_in_w if rank.get(u, 10 ** 9) < rank[v]]
            fav_strategy[v] = down[0] if down else succ_in_w[0]
    lose = frozenset(arena.vertices - w)
    win = frozenset(w)
    if favored == MIN:
        return BuchiGameResult(win, lose, fav_strategy, opp_strategy)
    return BuchiGameResult(lose, win, opp_strategy, fav_strategy)


def prune_to_accepting_lassos(g: ProductGraph) -> ProductGraph:
    """Subgraph induced by vertices from which an accepting lasso exists
    (a cycle through a final vertex is reachable)."""
    succ = g.succ_map()
    comps, comp_of = tarjan_scc(g.vertices, succ)
    has_self = {v for v in g.vertices if v in succ.get(v, ())}
    good = set()
    for comp in comps:
        cyclic = len(comp) > 1 or any(v in has_self for v in comp)
        if cyclic and comp & g.final:
            good |= comp
    keep = reaches(good, g.vertices, succ)
    return g.induced(keep)


# ---------------------------------------------------------------------------
# Discounted games (strategy iteration, exact rationals)


def _policy_values(nodes, moves, policy, lam):
    """Exact values of the play induced by a joint deterministic policy.

    ``moves[v]`` is a list of (target, weight, discounted); the policy picks
    one move per node.  Discounted steps multiply the remaining value by
    ``lam``; a cycle must contain a discounted step.
    """
    values = {}
    for start in sorted(nodes):
        if start in values:
            continue
        path = []
        pos = {}
        v = start
        while v not in values and v not in pos:
            pos[v] = len(path)
            path.append(v)
            v = moves[v][policy[v]][0]
        if v not in values:
            j = pos[v]
            acc = Fraction(0)
            disc = Fraction(1)
            for u in path[j:]:
                _, w, d = moves[u][policy[u]]
                acc += disc * w
                disc *= lam if d else 1
            if disc >= 1:
                raise SolverError("UNDISCOUNTED_CYCLE")
            values[v] = acc / (1 - disc)
        for u in reversed(path):
            tgt, w, d = moves[u][policy[u]]
            values[u] = w + (lam if d else Fraction(1)) * values[tgt]
    return values


def _solve_discounted(nodes, kinds, moves, lam):
    """Min-max discounted solve by nested strategy iteration.

    ``kinds[v]`` is MIN or MAX.  Returns (values, policy) with the policy
    exactly optimal (zero Bellman residual).
    """
    for v in nodes:
        if not moves[v]:
            raise SolverError("NO_SUCCESSOR", str(v))
    policy = {v: 0 for v in nodes}

    def improve(values, kind):
        changed = False
        for v in sorted(nodes):
            if kinds[v] != kind:
                continue
            qs = [w + (lam if d else Fraction(1)) * values[u]
                  for (u, w, d) in moves[v]]
            best = min(qs) if kind == MIN else max(qs)
            better = best < values[v] if kind == MIN else best > values[v]
            if better:
                policy[v] = qs.index(best)
                changed = True
        return changed

    while True:
        # fully optimize Min against the current Max policy
        while True:
            values = _policy_values(nodes, moves, policy, lam)
            if not improve(values, MIN):
                break
        if not improve(values, MAX):
            break
    return values, policy


def _arena_nodes(arena: GameArena):
    emap = arena.edge_map()
    nodes = sorted(arena.vertices)
    kinds = {v: (MIN if v in arena.min_vertices else MAX) for v in nodes}
    moves = {}
    for v in nodes:
        out = sorted(emap.get(v, ()), key=lambda e: (e.dst, e.weight))
        if kinds[v] == MIN:
            moves[v] = [(e.dst, Fraction(e.weight), True) for e in out]
        else:
            moves[v] = [(e.dst, Fraction(0), False) for e in out]
    return nodes, kinds, moves, emap


def solve_dsum_game(arena: GameArena, lam: Fraction) -> ValueMap:
    """Round-discounted min-max game value: one discount factor per round
    (Min's weighted rewrite move plus Max's free trace move)."""
    nodes, kinds, moves, _ = _arena_nodes(arena)
    values, policy = _solve_discounted(nodes, kinds, moves, lam)
    smin = {v: moves[v][policy[v]][0] for v in nodes if kinds[v] == MIN}
    smax = {v: moves[v][policy[v]][0] for v in nodes if kinds[v] == MAX}
    return ValueMap(values, smin, smax)


def min_dsum_single(g: ProductGraph, lam: Fraction) -> ValueMap:
    """Single-player minimum discounted cost from every vertex."""
    emap = g.edge_map()
    nodes = sorted(g.vertices)
    kinds = {v: MIN for v in nodes}
    moves = {v: [(e.dst, Fraction(e.weight), True)
                 for e in sorted(emap.get(v, ()), key=lambda e: (e.dst, e.weight))]
             for v in nodes}
    values, policy = _solve_discounted(nodes, kinds, moves, lam)
    smin = {v: moves[v][policy[v]][0] for v in nodes}
    return ValueMap(values, smin, {})


# ---------------------------------------------------------------------------
# Mean-payoff games


def _cycle_means_reachable(nodes, edges, maximize):
    """For each node, the extreme (max or min) cycle mean among cycles
    reachable from it; ``edges[v]`` is a list of (target, weight)."""
    succ = {v: [u for (u, _) in edges[v]] for v in nodes}
    comps, comp_of = tarjan_scc(nodes, succ)
    best_comp = {}
    result = {}
    sign = -1 if maximize else 1
    for ci, comp in enumerate(comps):
        internal = [(u, v, sign * w) for u in comp for (v, w) in edges[u]
                    if v in comp]
        has_cycle = any(u == v for (u, v, _) in internal) or len(comp) > 1
        own = None
        if has_cycle and internal:
            own = sign * _karp_scc_value(sorted(comp), internal)
        cand = [own] if own is not None else []
        for u in comp:
            for (v, _) in edges[u]:
                if comp_of[v] != ci and v in best_comp and best_comp[v] is not None:
                    cand.append(best_comp[v])
        val = None
        if cand:
            val = max(cand) if maximize else min(cand)
        for u in comp:
            best_comp[u] = val
            result[u] = val
    return result


def _energy_lift(nodes, moves, energy):
    """Least energy progress measure: ``moves[v]`` lists (target, z) with
    integer z; nodes in ``energy`` own the min in the lifting operator (they
    try to keep all formed cycles non-negative), the others own the max.

    Returns (measure, move) where measure[v] is the minimal sufficient
    initial credit (None = unbounded, the energy player loses at v) and
    move[v] the energy player's optimal choice.
    """
    neg = max((max(0, -z) for v in nodes for (_, z) in moves[v]), default=0)
    cap = len(nodes) * neg

    def lift(v, f):
        opts = []
        for (u, z) in moves[v]:
            fu = f[u]
            opts.append(None if fu is None else max(0, fu - z))
        if v in energy:
            return None if all(o is None for o in opts) else \
                min(o for o in opts if o is not None)
        return None if any(o is None for o in opts) else max(opts)

    f = {v: 0 for v in nodes}
    pred = {v: [] for v in nodes}
    for v in nodes:
        for (u, _) in moves[v]:
            pred[u].append(v)
    dirty = set(nodes)
    while dirty:
        v = dirty.pop()
        new = lift(v, f)
        if new is not None and new > cap:
            new = None
        if new != f[v]:
            f[v] = new
            dirty.update(pred[v])
    move = {}
    for v in nodes:
        if v in energy and f[v] is not None:
            best = None
            for (u, z) in moves[v]:
                if f[u] is None:
                    continue
                cand = (max(0, f[u] - z), u)
                if best is None or cand < best:
                    best = cand
            if best is not None:
                move[v] = best[1]
    return f, move


def solve_mean_game(arena: GameArena) -> ValueMap:
    """Exact mean-payoff values at round granularity: the value of a play is
    the limit mean of the product-edge weights, one weight per round.

    Values are located on the grid of possible cycle means by binary search
    with an energy-game decision procedure (progress-measure lifting), which
    is exact and deterministic; positional strategies are extracted from the
    lifting measures, one value class at a time, and certified by best-
    response cycle analysis.
    """
    emap = arena.edge_map()
    minv = sorted(arena.min_vertices)
    mids = sorted(arena.max_vertices)
    nodes = minv + mids
    min_moves = {}
    mid_replies = {}
    for v in minv:
        out = sorted((e.dst, e.weight) for e in emap.get(v, ()))
        if not out:
            raise SolverError("NO_SUCCESSOR", str(v))
        min_moves[v] = out
    for m in mids:
        replies = sorted(e.dst for e in emap.get(m, ()))
        if not replies:
            raise SolverError("NO_SUCCESSOR", str(m))
        mid_replies[m] = replies
    wmax = max((w for v in minv for (_, w) in min_moves[v]), default=0)
    n = max(1, len(minv))
    grid = sorted({Fraction(d, m) for m in range(1, n + 1)
                   for d in range(0, m * wmax + 1)})

    def decide(c: Fraction, geq: bool):
        """Winning set and energy strategy for 'round mean >= c' (Max is the
        energy player) or 'round mean <= c' (Min is the energy player)."""
        d, m = c.numerator, c.denominator
        sign = 1 if geq else -1
        # the shifted weight sits on the Min half-move; mids move freely
        moves = {v: [(mid, sign * (m * w - d)) for (mid, w) in min_moves[v]]
                 for v in minv}
        moves.update({mm: [(u, 0) for u in mid_replies[mm]] for mm in mids})
        energy = set(mids) if geq else set(minv)
        f, move = _energy_lift(nodes, moves, energy)
        return {v for v in nodes if f[v] is not None}, move

    values = {}

    def partition(vs, lo, hi):
        if not vs:
            return
        if lo == hi:
            for v in vs:
                values[v] = grid[lo]
            return
        mid = (lo + hi + 1) // 2
        win, _ = decide(grid[mid], geq=True)
        hi_set = [v for v in vs if v in win]
        lo_set = [v for v in vs if v not in win]
        partition(hi_set, mid, hi)
        partition(lo_set, lo, mid - 1)

    partition(minv, 0, len(grid) - 1)
    for m in mids:
        values[m] = max(values[u] for u in mid_replies[m])

    smin = {}
    for c in sorted({values[v] for v in minv}):
        _, move = decide(c, geq=False)
        for v in minv:
            if values[v] == c and v in move:
                smin[v] = move[v]
    smax = {}
    for c in sorted({values[m] for m in mids}):
        _, move = decide(c, geq=True)
        for m in mids:
            if values[m] == c and m in move:
                smax[m] = move[m]
    # exact certification: each strategy meets the computed value against the
    # opponent's best response
    def chosen_weight(v):
        return min(w for (mid, w) in min_moves[v] if mid == smin[v])

    upper = _cycle_means_reachable(
        minv,
        {v: [(u, chosen_weight(v)) for u in mid_replies[smin[v]]]
         for v in minv},
        maximize=True)
    lower = _cycle_means_reachable(
        minv,
        {v: [(smax[u], w) for (u, w) in min_moves[v]] for v in minv},
        maximize=False)
    if any(upper[v] != values[v] or lower[v] != values[v] for v in minv):
        raise SolverError("NO_CONVERGENCE", "mean-payoff certification failed")
    return ValueMap(values, smin, smax)


# ---------------------------------------------------------------------------
# Karp minimum mean cycle


def _karp_scc_value(vertices, edges):
    """Minimum cycle mean of a strongly connected graph (integer weights,
    exact Fraction result); ``edges`` is a list of (u, v, w)."""
    n = len(vertices)
    root = vertices[0]
    inf = None
    d = [{v: inf for v in vertices} for _ in range(n + 1)]
    d[0][root] = 0
    by_dst = {}
    for (u, v, w) in edges:
        by_dst.setdefault(v, []).append((u, w))
    for kk in range(1, n + 1):
        for v in vertices:
            best = inf
            for (u, w) in by_dst.get(v, ()):
                if d[kk - 1][u] is None:
                    continue
                cand = d[kk - 1][u] + w
                if best is None or cand < best:
                    best = cand
            d[kk][v] = best
    mu = None
    for v in vertices:
        if d[n][v] is None:
            continue
        worst = None
        for kk in range(n):
            if d[kk][v] is None:
                continue
            ratio = Fraction(d[n][v] - d[kk][v], n - kk)
            if worst is None or ratio > worst:
                worst = ratio
        if worst is not None and (mu is None or worst < mu):
            mu = worst
    return mu


def karp_min_mean_cycle(vertices, edges) -> CycleResult:
    """Minimum cycle-mean value and a witness simple cycle.

    ``edges`` is an iterable of (u, v, w) with integer weights.  The witness
    is recovered from the tight-edge subgraph of the Bellman-Ford potentials
    for the reduced weights w - mu, in which every minimum-mean cycle is
    fully tight.
    """
    vertices = sorted(set(vertices))
    edges = sorted(edges)
    succ = {v: [] for v in vertices}
    for (u, v, w) in edges:
        succ[u].append(v)
    comps, _ = tarjan_scc(vertices, succ)
    self_loops = {u for (u, v, _) in edges if u == v}
    best = None
    best_comp = None
    for comp in comps:
        if len(comp) == 1 and not (comp & self_loops):
            continue
        internal = [(u, v, w) for (u, v, w) in edges if u in comp and v in comp]
        if not internal:
            continue
        mu = _karp_scc_value(sorted(comp), internal)
        if mu is not None and (best is None or mu < best):
            best = mu
            best_comp = (sorted(comp), internal)
    if best is None:
        raise SolverError("ACYCLIC")
    comp_vs, internal = best_comp
    # Bellman-Ford potentials for reduced weights, then a cycle of tight edges
    dist = {v: None for v in comp_vs}
    dist[comp_vs[0]] = Fraction(0)
    for _ in range(len(comp_vs)):
        for (u, v, w) in internal:
            if dist[u] is None:
                continue
            cand = dist[u] + w - best
            if dist[v] is None or cand < dist[v]:
                dist[v] = cand
    tight = {v: [] for v in comp_vs}
    for (u, v, w) in internal:
        if dist[u] is not None and dist[v] is not None and dist[u] + w - best == dist[v]:
            tight[u].append(v)
    cycle = _find_cycle(comp_vs, tight)
    if cycle is None:  # pragma: no cover - tightness guarantees a cycle
        raise SolverError("ACYCLIC", "no tight cycle found")
    wmap = {}
    for (u, v, w) in internal:
        if (u, v) not in wmap or w < wmap[(u, v)]:
            wmap[(u, v)] = w
    total = sum(wmap[(cycle[i], cycle[(i + 1) % len(cycle)])]
                for i in range(len(cycle)))
    assert Fraction(total, len(cycle)) == best
    return CycleResult(best, Lasso((), tuple(cycle)), total, len(cycle))


def _find_cycle(vertices, succ):
    """Some simple cycle in the graph, rotated to start at its least vertex;
    deterministic (sorted DFS)."""
    color = {}
    for root in vertices:
        if root in color:
            continue
        stack = [(root, iter(sorted(succ.get(root, ()))))]
        color[root] = 1
        on_path = [root]
        while stack:
            v, it = stack[-1]
            advanced = False
            for w in it:
                if color.get(w) == 1:
                    i = on_path.index(w)
                    cyc = on_path[i:]
                    j = cyc.index(min(cyc))
                    return cyc[j:] + cyc[:j]
                if w not in color:
                    color[w] = 1
                    on_path.append(w)
                    stack.append((w, iter(sorted(succ.get(w, ())))))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                color[v] = 2
                on_path.pop()
    return None


# ---------------------------------------------------------------------------
# Bottleneck threshold searches


def minimax_lasso_sup(g: ProductGraph) -> ThresholdResult:
    """Least c such that an accepting lasso from the initial vertices uses
    only edges of weight at most c (prefix and cycle both constrained)."""
    for c in sorted({e.weight for e in g.edges}):
        sub = g.induced(g.vertices)
        sub.edges = tuple(e for e in g.edges if e.weight <= c)
        if prune_to_accepting_lassos(sub).initial:
            return ThresholdResult(Fraction(c), Attainment.ATTAINED,
                                   MemoryClass.POSITIONAL, Orientation.IMPAIR)
    return ThresholdResult(None, None, None, Orientation.IMPAIR)


def min_limsup_cycle(g: ProductGraph) -> ThresholdResult:
    """Least c such that an accepting cycle of edges of weight at most c is
    reachable from the initial vertices (prefix weights unconstrained)."""
    reach = reachable_from(g.initial, g.succ_map())
    for c in sorted({e.weight for e in g.edges}):
        succ = {v: [] for v in reach}
        for e in g.edges:
            if e.weight <= c and e.src in reach and e.dst in reach:
                succ[e.src].append(e.dst)
        comps, _ = tarjan_scc(reach, succ)
        for comp in comps:
            cyclic = len(comp) > 1 or any(v in succ.get(v, ()) for v in comp)
            if cyclic and comp & g.final:
                return ThresholdResult(Fraction(c), Attainment.ATTAINED,
                                       MemoryClass.POSITIONAL, Orientation.IMPAIR)
    return ThresholdResult(None, None, None, Orientation.IMPAIR)
