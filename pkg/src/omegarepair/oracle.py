"""Brute-force ground truth at desk scale.

Everything here is deliberately exponential: simple-lasso enumeration over
products, exhaustive (lazily enumerated) adversary strategies for tiny games,
and bounded rewrite search over run graphs.  Positional determinacy makes
lasso-shaped optima exact, so these values are exact references for the
polynomial solvers on small instances.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

from .core import (NBA, Aggregator, AggregatorKind, KripkeStructure, Lasso,
                   RepairMachine, RMTransition, _dsum_finite, eval_aggregator)
from .graphutil import reaches, tarjan_scc
from .product import ProductGraph, build_arena, build_product, output_product

_STEP_CAP = 2_000_000


class OracleError(Exception):
    def __init__(self, code: str, detail: str = ""):
        self.code = code
        super().__init__(f"{code}{': ' + detail if detail else ''}")


@dataclass
class OracleBudget:
    max_prefix: Optional[int] = None  # default |V|^2
    max_cycle: Optional[int] = None   # default |V|
    max_vertices: int = 400
    max_strategies: int = 4096

    def resolved(self, n_vertices: int) -> "OracleBudget":
        return OracleBudget(
            max_prefix=self.max_prefix if self.max_prefix is not None
            else n_vertices * n_vertices,
            max_cycle=self.max_cycle if self.max_cycle is not None
            else n_vertices,
            max_vertices=self.max_vertices,
            max_strategies=self.max_strategies,
        )


# ---------------------------------------------------------------------------
# Simple-lasso enumeration on generic weighted graphs
#
# A graph here is (vertices, edges) with edges (src, dst, weight); ``final``
# marks the Buchi states.


def _edge_map(edges):
    out: Dict[object, list] = {}
    for e in edges:
        out.setdefault(e[0], []).append(e)
    return out


def _simple_lassos(start, emap, budget: OracleBudget) -> Iterator[Tuple[tuple, tuple]]:
    """All (prefix_edges, cycle_edges) with a vertex-simple stem from
    ``start`` closed by one back edge into the stem."""
    steps = 0
    path_edges: List[tuple] = []
    on_path = {start: 0}
    order = [start]

    def rec(v):
        nonlocal steps
        steps += 1
        if steps > _STEP_CAP:
            raise OracleError("BUDGET", "lasso enumeration step cap exceeded")
        for e in sorted(emap.get(v, ())):
            dst = e[1]
            if dst in on_path:
                cut = on_path[dst]
                prefix = tuple(path_edges[:cut])
                cycle = tuple(path_edges[cut:]) + (e,)
                if len(prefix) <= budget.max_prefix and len(cycle) <= budget.max_cycle:
                    yield prefix, cycle
            elif len(order) <= budget.max_prefix + budget.max_cycle:
                on_path[dst] = len(order)
                order.append(dst)
                path_edges.append(e)
                yield from rec(dst)
                path_edges.pop()
                order.pop()
                del on_path[dst]

    yield from rec(start)


def _succ_map(vertices, edges):
    out = {v: [] for v in vertices}
    for (a, b, _) in edges:
        out[a].append(b)
    return out


def _accepting_cycle_vertices(vertices, edges, final):
    """Vertices lying on some cycle through a final vertex."""
    succ = _succ_map(vertices, edges)
    comps, comp_of = tarjan_scc(vertices, succ)
    good = set()
    for comp in comps:
        cyclic = len(comp) > 1 or any(v in succ[v] for v in comp)
        if cyclic and comp & set(final):
            good |= comp
    return good, comp_of, succ


def single_player_values(vertices, edges, final, start, lam: Optional[Fraction],
                         budget: OracleBudget) -> Dict[AggregatorKind, Optional[Fraction]]:
    """Exact single-player optimal values from ``start`` for all aggregators,
    by exhausting simple lassos.

    DSum is the infimum over runs that can keep satisfying the Buchi
    condition (acceptance may be deferred forever, so the lasso itself need
    not be accepting but must stay where acceptance remains possible); Mean
    likewise only requires the cycle to share an SCC with an accepting cycle;
    Sup and LimSup need the lasso cycle itself to meet a final vertex.
    """
    budget = budget.resolved(len(vertices))
    good, comp_of, succ = _accepting_cycle_vertices(vertices, edges, final)
    capable = reaches(good, vertices, succ)
    qualifying = {comp_of[v] for v in good}
    out: Dict[AggregatorKind, Optional[Fraction]] = {
        k: None for k in AggregatorKind}
    emap = _edge_map(edges)
    if start not in capable:
        return out

    def keep_min(kind, val):
        if out[kind] is None or val < out[kind]:
            out[kind] = val

    for prefix, cycle in _simple_lassos(start, emap, budget):
        verts = [e[0] for e in prefix] + [e[0] for e in cycle]
        cyc_verts = {e[0] for e in cycle}
        accepting = bool(cyc_verts & set(final))
        if accepting:
            keep_min(AggregatorKind.SUP,
                     Fraction(max(e[2] for e in prefix + cycle)))
            keep_min(AggregatorKind.LIMSUP,
                     Fraction(max(e[2] for e in cycle)))
        comp = comp_of[cycle[0][0]]
        if comp in qualifying and all(comp_of[v] == comp for v in cyc_verts):
            keep_min(AggregatorKind.MEAN,
                     Fraction(sum(e[2] for e in cycle), len(cycle)))
        if lam is not None and all(v in capable for v in verts):
            costs = Lasso(tuple(e[2] for e in prefix), tuple(e[2] for e in cycle))
            keep_min(AggregatorKind.DSUM,
                     eval_aggregator(Aggregator(AggregatorKind.DSUM, lam), costs))
    return out


def _product_graph_data(g: ProductGraph):
    edges = [(e.src, e.dst, e.weight) for e in g.edges]
    return set(g.vertices), edges, set(g.final)


def enumerate_accepting_lassos(g: ProductGraph, b: OracleBudget) -> Iterator[Lasso]:
    """All accepting vertex lassos of the product, simple cycle, one
    representative per cycle rotation."""
    vertices, edges, final = _product_graph_data(g)
    if len(vertices) > b.max_vertices:
        raise OracleError("BUDGET", "vertex budget exceeded")
    budget = b.resolved(len(vertices))
    emap = _edge_map(edges)
    seen = set()
    for v in sorted(g.initial):
        for prefix, cycle in _simple_lassos(v, emap, budget):
            cyc_verts = tuple(e[0] for e in cycle)
            if not (set(cyc_verts) & final):
                continue
            k = cyc_verts.index(min(cyc_verts))
            key = (cyc_verts[k:] + cyc_verts[:k], v, len(prefix))
            if key in seen:
                continue
            seen.add(key)
            yield Lasso(tuple(e[0] for e in prefix), cyc_verts)


def brute_impair_threshold(g: ProductGraph, agg: Aggregator,
                           b: OracleBudget = None) -> Optional[Fraction]:
    """Minimum adversary cost over enumerated lassos; None when no initial
    vertex can reach an accepting cycle."""
    b = b or OracleBudget()
    vertices, edges, final = _product_graph_data(g)
    if len(vertices) > b.max_vertices:
        raise OracleError("BUDGET", "vertex budget exceeded")
    best = None
    for v in sorted(g.initial):
        vals = single_player_values(vertices, edges, final, v, agg.lam, b)
        val = vals[agg.kind]
        if val is not None and (best is None or val < best):
            best = val
    return best


# ---------------------------------------------------------------------------
# Repair oracle: exhaustive positional adversary strategies


def _arena_round_data(arena):
    """Min-vertex round graph ingredients: for each Min vertex the list of
    (mid, weight) moves, and for each mid its successor Min vertices."""
    min_moves: Dict[object, list] = {v: [] for v in arena.min_vertices}
    mid_moves: Dict[object, list] = {v: [] for v in arena.max_vertices}
    for e in arena.edges:
        if e.src in min_moves:
            min_moves[e.src].append((e.dst, e.weight))
        else:
            mid_moves[e.src].append(e.dst)
    for v in min_moves:
        min_moves[v].sort()
    for v in mid_moves:
        mid_moves[v].sort()
    return min_moves, mid_moves


def _max_plans(starts, min_moves, mid_moves, max_strategies) -> Iterator[dict]:
    """Lazily enumerate adversary choices for the mids reachable under the
    choices made so far; unreachable mids never branch."""
    count = 0

    def rec(assigned):
        nonlocal count
        # reachability under current partial plan; stop at unassigned mids
        seen = set()
        frontier = sorted(starts)
        pending = None
        while frontier:
            v = frontier.pop()
            if v in seen:
                continue
            seen.add(v)
            if v in min_moves:
                frontier.extend(m for (m, _) in min_moves[v])
            elif v in assigned:
                frontier.append(assigned[v])
            else:
                if pending is None or v < pending:
                    pending = v
        if pending is None:
            count += 1
            if count > max_strategies:
                raise OracleError("BUDGET", "strategy budget exceeded")
            yield dict(assigned)
            return
        for choice in mid_moves[pending]:
            assigned[pending] = choice
            yield from rec(assigned)
            del assigned[pending]

    yield from rec({})


def _round_attractor(targets, player, min_moves, mid_moves, region):
    """Alternating attractor on the round structure restricted to ``region``.

    ``player`` is "min" or "max"; Min owns the rewrite vertices, Max the
    mids.  A vertex whose owner has no move inside the region is attracted
    for the opponent (a stuck player loses)."""
    att = set(targets) & region

    def pulled(v):
        if v in min_moves:
            moves = [m for (m, _) in min_moves[v] if m in region]
            mine = player == "min"
        else:
            moves = [m for m in mid_moves[v] if m in region]
            mine = player == "max"
        if not moves:
            return not mine
        if mine:
            return any(m in att for m in moves)
        return all(m in att for m in moves)

    changed = True
    while changed:
        changed = False
        for v in region:
            if v not in att and pulled(v):
                att.add(v)
                changed = True
    return att


def _min_buchi_win(min_moves, mid_moves, final):
    """Vertices from which the rewriter wins the Buchi game, by the classical
    repeated-attractor computation (independent of the solver module)."""
    region = set(min_moves) | set(mid_moves)
    while True:
        live = {f for f in set(final) & region
                if (any(m in region for (m, _) in min_moves[f])
                    if f in min_moves
                    else any(m in region for m in mid_moves[f]))}
        reach = _round_attractor(live, "min", min_moves, mid_moves, region)
        trap = region - reach
        if not trap:
            return region
        region -= _round_attractor(trap, "max", min_moves, mid_moves, region)
        if not region:
            return region


def _zero_trap_mean_value(min_moves, mid_moves, final, starts, win):
    """Certificate that the repair Mean game value is exactly 0: Min owns a
    zero-cost closed trap whose attractor covers the whole Buchi-winning
    region.  Looping in the trap ever longer between bounded accepting
    excursions drives the mean to 0; nonnegative costs give the matching
    lower bound.  Returns 0 when the certificate applies, else None."""
    if not set(starts) <= win:
        return None
    trap = {v for v in min_moves if v in win}
    changed = True
    while changed:
        changed = False
        for v in sorted(trap, key=str):
            ok = any(w == 0 and mid in win
                     and all(u in trap for u in mid_moves[mid])
                     for (mid, w) in min_moves[v])
            if not ok:
                trap.discard(v)
                changed = True
    if not trap:
        return None
    att = _round_attractor(trap, "min", min_moves, mid_moves, win)
    if win - att:
        return None
    return Fraction(0)


def _min_cycle_mean_karp(vertices, edges):
    """Minimum cycle mean via Karp's recurrence; None when acyclic."""
    order = sorted(vertices, key=str)
    idx = {v: i for i, v in enumerate(order)}
    n = len(order)
    inf = None
    d = [[inf] * n for _ in range(n + 1)]
    for i in range(n):
        d[0][i] = Fraction(0)
    for k in range(1, n + 1):
        row, prev = d[k], d[k - 1]
        for (u, v, w) in edges:
            pu = prev[idx[u]]
            if pu is None:
                continue
            cand = pu + w
            j = idx[v]
            if row[j] is None or cand < row[j]:
                row[j] = cand
    best = None
    for i in range(n):
        if d[n][i] is None:
            continue
        worst = None
        for k in range(n):
            if d[k][i] is None:
                continue
            m = Fraction(d[n][i] - d[k][i], n - k)
            if worst is None or m > worst:
                worst = m
        if worst is not None and (best is None or worst < best):
            best = worst
    return best


def _plan_value(kind, lam, vertices, edges, final, start,
                budget: OracleBudget) -> Optional[Fraction]:
    """Exact one-player optimum on a round graph collapsed under an
    adversary plan.  Discounted sums fall back to lasso enumeration; the
    prefix-independent aggregators use polynomial reachability/SCC scans so
    larger fixed instances stay checkable."""
    if kind is AggregatorKind.DSUM:
        return single_player_values(vertices, edges, final, start, lam,
                                    budget)[kind]
    succ = _succ_map(vertices, edges)
    reach = {start}
    stack = [start]
    while stack:
        for u in succ[stack.pop()]:
            if u not in reach:
                reach.add(u)
                stack.append(u)
    weights = sorted({e[2] for e in edges})
    if kind in (AggregatorKind.SUP, AggregatorKind.LIMSUP):
        for c in weights:
            cheap = [e for e in edges if e[2] <= c]
            good, _, _ = _accepting_cycle_vertices(vertices, cheap, final)
            if kind is AggregatorKind.SUP:
                csucc = _succ_map(vertices, cheap)
                seen = {start}
                stack = [start]
                hit = start in good
                while stack and not hit:
                    for u in csucc[stack.pop()]:
                        if u not in seen:
                            if u in good:
                                hit = True
                                break
                            seen.add(u)
                            stack.append(u)
                if hit:
                    return Fraction(c)
            elif good & reach:
                return Fraction(c)
        return None
    # Mean: cheapest simple cycle inside a reachable SCC that also carries
    # an accepting cycle (acceptance can be deferred at vanishing frequency).
    good, comp_of, _ = _accepting_cycle_vertices(vertices, edges, final)
    best = None
    for comp_id in {comp_of[v] for v in good if v in reach}:
        comp = [v for v in vertices if comp_of[v] == comp_id]
        inner = [e for e in edges if comp_of[e[0]] == comp_id
                 and comp_of[e[1]] == comp_id]
        m = _min_cycle_mean_karp(comp, inner)
        if m is not None and (best is None or m < best):
            best = m
    return best


def _uniform_plans(min_moves, mid_moves):
    """Adversary plans that always pick the successor whose underlying
    system state is most preferred, one plan per preference permutation
    (capped); evaluating these first often exposes the worst trace early."""
    import itertools
    kstates = sorted({m.kripke for moves in mid_moves.values() for m in moves})
    for perm in itertools.islice(itertools.permutations(kstates), 24):
        rank = {s: i for i, s in enumerate(perm)}
        yield {mid: min(moves, key=lambda m: (rank[m.kripke], m))
               for mid, moves in mid_moves.items() if moves}


def brute_repair_threshold(k: KripkeStructure, t: RepairMachine, b: NBA,
                           agg: Aggregator = None,
                           budget: OracleBudget = None) -> Optional[Fraction]:
    """Game value by exhausting positional adversary strategies and exact
    one-player minimization on each induced round graph; None means the
    adversary can prevent repair altogether (threshold infinite).

    Sound shortcuts keep fixed larger instances within reach: an independent
    Buchi-game check settles feasibility up front (positional determinacy
    lets the adversary force non-acceptance exactly when the rewriter does
    not win), a zero-trap certificate settles Mean value 0, and enumeration
    stops once the running maximum hits the weight cap, which no plan can
    exceed."""
    budget = budget or OracleBudget()
    agg = agg or t.aggregator
    g = build_product(k, t, b)
    arena = build_arena(g)
    min_moves, mid_moves = _arena_round_data(arena)
    final = set(arena.final)
    starts = sorted(arena.initial)
    if not starts:
        return None
    win = _min_buchi_win(min_moves, mid_moves, final)
    if not set(starts) <= win:
        return None
    if agg.kind is AggregatorKind.MEAN:
        certified = _zero_trap_mean_value(min_moves, mid_moves, final,
                                          starts, win)
        if certified is not None:
            return certified
    wmax = max((w for moves in min_moves.values() for (_, w) in moves),
               default=0)
    cap = None if agg.kind is AggregatorKind.DSUM else Fraction(wmax)
    vertices = set(min_moves)

    def evaluate(plan):
        edges = []
        for v, moves in min_moves.items():
            for (mid, w) in moves:
                if mid in plan:
                    edges.append((v, plan[mid], w))
        worst = Fraction(0)
        for v in starts:
            val = _plan_value(agg.kind, agg.lam, vertices, edges, final, v,
                              budget)
            if val is None:
                return None
            worst = max(worst, val)
        return worst

    best = None  # max over adversary plans
    for plan in _uniform_plans(min_moves, mid_moves):
        worst = evaluate(plan)
        if worst is None:
            return None
        if best is None or worst > best:
            best = worst
        if cap is not None and best == cap:
            return best
    for plan in _max_plans(starts, min_moves, mid_moves, budget.max_strategies):
        worst = evaluate(plan)
        if worst is None:
            return None
        if best is None or worst > best:
            best = worst
        if cap is not None and best == cap:
            return best
    return best


# ---------------------------------------------------------------------------
# Bounded rewrite search on run graphs


def _run_graph(t2: RepairMachine, word: Lasso):
    """Graph of (machine state, lasso position) nodes; edges carry costs."""
    p, c = len(word.prefix), len(word.cycle)
    total = p + c

    def step(pos):
        return pos + 1 if pos + 1 < total else p

    vertices = {(q, i) for q in t2.states for i in range(total)}
    edges = []
    for (q, i) in sorted(vertices):
        sym = word.at(i)
        for tr in t2.transitions_from(q, sym):
            edges.append(((q, i), (tr.dst, step(i)), tr.cost))
    final = {(q, i) for (q, i) in vertices if q in t2.accepting}
    starts = sorted((q, 0) for q in t2.initial)
    return vertices, edges, final, starts


def accepting_run_costs(t2: RepairMachine, word: Lasso,
                        budget: OracleBudget = None) -> List[Fraction]:
    """Aggregated costs of all lasso-shaped accepting runs of ``t2`` on the
    input word, sorted ascending."""
    budget = (budget or OracleBudget()).resolved(
        len(t2.states) * (len(word.prefix) + len(word.cycle)))
    vertices, edges, final, starts = _run_graph(t2, word)
    emap = _edge_map(edges)
    costs = set()
    for s in starts:
        for prefix, cycle in _simple_lassos(s, emap, budget):
            if not ({e[0] for e in cycle} & final):
                continue
            lasso = Lasso(tuple(e[2] for e in prefix), tuple(e[2] for e in cycle))
            costs.add(eval_aggregator(t2.aggregator, lasso))
    return sorted(costs)


def _bfs_tree(source, emap):
    """Hop-shortest parent-edge map from ``source`` (cheapest edge on ties)."""
    parent = {source: None}
    frontier = [source]
    while frontier:
        nxt = []
        for u in frontier:
            for e in sorted(emap.get(u, ())):
                if e[1] not in parent:
                    parent[e[1]] = e
                    nxt.append(e[1])
        frontier = nxt
    return parent


def _tree_path(parent, target):
    path = []
    e = parent.get(target)
    while e is not None:
        path.append(e)
        e = parent[e[0]]
    path.reverse()
    return path


def _anchor_cycles(vertices, edges, final):
    """One accepting closed walk anchored at each node that can reach and
    return from a final node, assembled from hop-shortest paths; the walk
    need not be simple, which suffices for lasso-shaped runs."""
    emap = _edge_map(edges)
    rmap: Dict[object, list] = {}
    for e in edges:
        rmap.setdefault(e[1], []).append((e[1], e[0], e[2], e))
    anchors: Dict[object, tuple] = {}
    for f in sorted(final):
        fwd = _bfs_tree(f, emap)  # f -> v paths
        back = _bfs_tree(f, rmap)  # v -> f paths, edges reversed
        for v in fwd:
            if v not in back:
                continue
            to_f = [r[3] for r in reversed(_tree_path(back, v))]
            from_f = _tree_path(fwd, v)
            cycle = tuple(to_f) + tuple(from_f)
            if not cycle:  # v == f with no detour: close with one step
                loops = [e for e in emap.get(f, ())]
                best = None
                for e in sorted(loops):
                    tail = [r[3] for r in reversed(_tree_path(back, e[1]))] \
                        if e[1] != f else []
                    if e[1] == f or e[1] in back:
                        cand = (e,) + tuple(tail)
                        if best is None or len(cand) < len(best):
                            best = cand
                if best is None:
                    continue
                cycle = best
            if v not in anchors or len(cycle) < len(anchors[v]):
                anchors[v] = cycle
    return anchors


def _dsum_walk_rewrite(vertices, edges, final, starts, lam: Fraction,
                       tau: Fraction, budget: OracleBudget):
    """Cheapest discounted run shaped as a walk prefix closed by a simple
    accepting cycle; returns (prefix_nodes, cycle_nodes) or None.

    Discounted costs reward delaying expensive cycles, so the optimal prefix
    may revisit states; walks up to the prefix budget capture every value a
    bounded run can achieve.
    """
    emap = _edge_map(edges)
    # Normalized cycle value per anchor node: entering the cycle at
    # absolute position k contributes lam**k times this quantity.
    cycval: Dict[object, Tuple[Fraction, tuple]] = {}
    for v, cycle in _anchor_cycles(vertices, edges, final).items():
        val = _dsum_finite([e[2] for e in cycle], lam) / (1 - lam ** len(cycle))
        cycval[v] = (val, cycle)
    if not cycval:
        return None
    best = None  # (total, k, node)
    layer = {s: (Fraction(0), None) for s in starts}
    trace = [layer]
    power = Fraction(1)
    for k in range(budget.max_prefix + 1):
        for v, (g, _) in layer.items():
            if v in cycval:
                total = g + power * cycval[v][0]
                if total <= tau and (best is None or total < best[0]):
                    best = (total, k, v)
        if k == budget.max_prefix:
            break
        nxt: Dict[object, Tuple[Fraction, object]] = {}
        for v, (g, _) in layer.items():
            for e in emap.get(v, ()):
                cand = g + power * e[2]
                cur = nxt.get(e[1])
                if cur is None or cand < cur[0]:
                    nxt[e[1]] = (cand, v)
        layer = nxt
        trace.append(layer)
        power *= lam
    if best is None:
        return None
    _, k, v = best
    prefix = []
    node = v
    for i in range(k, 0, -1):
        prefix.append(node)
        node = trace[i][node][1]
    prefix.append(node)
    prefix.reverse()
    prefix.pop()  # the anchor starts the cycle
    cycle = [e[0] for e in cycval[v][1]]
    return tuple(prefix), tuple(cycle)


def bounded_bad_rewrite(tq: RepairMachine, a: NBA, word: Lasso, tau: Fraction,
                        agg: Aggregator = None,
                        budget: OracleBudget = None) -> Optional[Lasso]:
    """Search for a lasso-shaped accepting run of the output-synchronized
    machine on the input word with aggregated cost at most tau; returns the
    run (as a state lasso) or None."""
    t2 = output_product(tq, a)
    agg = agg or t2.aggregator
    budget = (budget or OracleBudget()).resolved(
        len(t2.states) * (len(word.prefix) + len(word.cycle)))
    vertices, edges, final, starts = _run_graph(t2, word)
    if agg.kind is AggregatorKind.DSUM:
        found = _dsum_walk_rewrite(vertices, edges, final, starts, agg.lam,
                                   tau, budget)
        if found is None:
            return None
        prefix_nodes, cycle_nodes = found
        return Lasso(tuple(n[0] for n in prefix_nodes),
                     tuple(n[0] for n in cycle_nodes))
    emap = _edge_map(edges)
    best = None
    for s in starts:
        for prefix, cycle in _simple_lassos(s, emap, budget):
            if not ({e[0] for e in cycle} & final):
                continue
            costs = Lasso(tuple(e[2] for e in prefix), tuple(e[2] for e in cycle))
            if eval_aggregator(agg, costs) <= tau:
                run = Lasso(tuple(e[0][0] for e in prefix),
                            tuple(e[0][0] for e in cycle))
                if best is None:
                    best = run
    return best


# ---------------------------------------------------------------------------
# Seeded instance generation and the agreement sweep


def random_instance(seed: int) -> Tuple[KripkeStructure, RepairMachine, NBA]:
    """Deterministic small instance: components of 1-3 states, weights <= 4,
    at most one branching Kripke state (dropped when the adversary strategy
    space would exceed the budget)."""
    rng = random.Random(seed)
    props = ("x", "y")
    ns, nq, np_ = rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 3)

    kstates = tuple(f"s{i}" for i in range(ns))
    labeling = {s: rng.choice(props) for s in kstates}
    ktrans = {(s, rng.choice(kstates)) for s in kstates}
    if ns > 1 and nq * np_ <= 6 and rng.random() < 0.6:
        s = rng.choice(kstates)
        ktrans.add((s, rng.choice(kstates)))
    k = KripkeStructure(
        states=frozenset(kstates),
        transitions=frozenset(ktrans),
        initial=frozenset({kstates[0]}),
        propositions=frozenset(props),
        labeling=labeling,
    )

    qstates = tuple(f"q{i}" for i in range(nq))
    ttrans = set()
    for q in qstates:
        for sym in props:
            n_out = 1 + (1 if rng.random() < 0.3 else 0)
            for _ in range(n_out):
                out_len = rng.choices((0, 1, 2), weights=(15, 60, 25))[0]
                out = tuple(rng.choice(props) for _ in range(out_len))
                ttrans.add(RMTransition(q, sym, rng.choice(qstates), out,
                                        rng.randint(0, 4)))
    tacc = {q for q in qstates if rng.random() < 0.5} or {rng.choice(qstates)}
    t = RepairMachine(
        states=frozenset(qstates),
        input_alphabet=frozenset(props),
        output_alphabet=frozenset(props),
        initial=frozenset({qstates[0]}),
        accepting=frozenset(tacc),
        transitions=frozenset(ttrans),
        aggregator=Aggregator(AggregatorKind.MEAN),
    )

    pstates = tuple(f"p{i}" for i in range(np_))
    btrans = set()
    for p in pstates:
        for sym in props:
            if rng.random() < 0.9:
                btrans.add((p, sym, rng.choice(pstates)))
            if rng.random() < 0.3:
                btrans.add((p, sym, rng.choice(pstates)))
    bacc = {p for p in pstates if rng.random() < 0.5} or {rng.choice(pstates)}
    b = NBA(
        states=frozenset(pstates),
        alphabet=frozenset(props),
        initial=frozenset({pstates[0]}),
        accepting=frozenset(bacc),
        transitions=frozenset(btrans),
    )
    return k, t, b


def _fmt(x: Optional[Fraction]) -> str:
    if x is None:
        return "oo"
    return f"{x.numerator}/{x.denominator}"


_AGGREGATORS = (
    Aggregator(AggregatorKind.DSUM, Fraction(1, 2)),
    Aggregator(AggregatorKind.MEAN),
    Aggregator(AggregatorKind.SUP),
    Aggregator(AggregatorKind.LIMSUP),
)


def oracle_report(seed: int, budget: OracleBudget = None) -> List[str]:
    """Solver/oracle agreement on one seeded instance; one report line per
    aggregator and direction."""
    from .impair import impair_threshold
    from .repair import repair_threshold

    budget = budget or OracleBudget()
    k, t, b = random_instance(seed)
    lines = []
    for agg in _AGGREGATORS:
        ta = replace(t, aggregator=agg)
        for mode, solver_fn, oracle_fn in (
            ("REPAIR",
             lambda: repair_threshold(k, ta, b).value,
             lambda: brute_repair_threshold(k, ta, b, agg, budget)),
            ("IMPAIR",
             lambda: impair_threshold(k, ta, b).value,
             lambda: brute_impair_threshold(build_product(k, ta, b), agg, budget)),
        ):
            sv = solver_fn()
            ov = oracle_fn()
            verdict = "OK" if sv == ov else "MISMATCH"
            lines.append(
                f"SEED {seed} AGG {agg.kind.value}:{mode} "
                f"SOLVER {_fmt(sv)} ORACLE {_fmt(ov)} VERDICT {verdict}")
    return lines
