"""Game and one-player solvers over product graphs."""

from fractions import Fraction

from omegarepair.product import build_arena, build_product
from omegarepair.solvers import (karp_min_mean_cycle, min_dsum_single,
                                 min_limsup_cycle, minimax_lasso_sup,
                                 prune_to_accepting_lassos, solve_buchi_game)

from conftest import mkgraph, vtx

F = Fraction


def delayed_dsum_graph():
    """Three-vertex chain whose optimal discounted run delays the costly
    accepting loop arbitrarily long: the value at the start is 1 (infimum)."""
    p0, p1, p2 = vtx("p0"), vtx("p1"), vtx("p2")
    g = mkgraph([(p0, p1, 1), (p1, p1, 0), (p1, p2, 1), (p2, p2, 1)],
                [p0], [p2])
    return g, p0, p1, p2


def test_min_dsum_single_values():
    g, p0, p1, p2 = delayed_dsum_graph()
    vm = min_dsum_single(g, F(1, 2))
    assert vm.values[p0] == 1
    assert vm.values[p1] == 0
    assert vm.values[p2] == 2


def test_prune_keeps_accepting_lasso_core():
    g, p0, p1, p2 = delayed_dsum_graph()
    pruned = prune_to_accepting_lassos(g)
    assert pruned.vertices == {p0, p1, p2}
    # a final vertex with no cycle back gets dropped
    q0, q1 = vtx("q0"), vtx("q1")
    g2 = mkgraph([(q0, q1, 0), (q1, q0, 0), (q0, q0, 1)], [q0], [vtx("qq")])
    assert not prune_to_accepting_lassos(g2).vertices


def test_karp_min_mean_cycle():
    edges = [("a", "b", 1), ("b", "a", 2), ("b", "c", 0), ("c", "c", 1)]
    res = karp_min_mean_cycle({"a", "b", "c"}, edges)
    assert res.value == 1
    assert res.total_cost == res.length * res.value
    # the witness is a real cycle of the claimed mean
    nodes = res.cycle.cycle
    assert len(nodes) == res.length
    pairs = {(x, y) for (x, y, _) in edges}
    for i, u in enumerate(nodes):
        assert (u, nodes[(i + 1) % len(nodes)]) in pairs
    edges2 = [("a", "a", 3), ("a", "b", 0), ("b", "a", 0)]
    assert karp_min_mean_cycle({"a", "b"}, edges2).value == 0


def test_buchi_game_on_printer(printer_kripke, printer_rm, printer_spec):
    arena = build_arena(build_product(printer_kripke, printer_rm,
                                      printer_spec))
    res = solve_buchi_game(arena)
    assert arena.initial <= res.min_winning
    # winning Min vertices have a strategy edge staying in the winning set
    emap = arena.edge_map()
    for v, succ in res.min_strategy.items():
        assert any(e.dst == succ for e in emap[v])
        assert succ in res.min_winning


def test_single_player_sup_and_limsup(printer_kripke, printer_rm,
                                      printer_spec):
    pruned = prune_to_accepting_lassos(
        build_product(printer_kripke, printer_rm, printer_spec))
    sup_res = minimax_lasso_sup(pruned)
    lim_res = min_limsup_cycle(pruned)
    # without an adversary the printer can idle at zero cost
    assert sup_res.value == 0
    assert lim_res.value == 0
    assert sup_res.value >= lim_res.value
    g, p0, p1, p2 = delayed_dsum_graph()
    pruned2 = prune_to_accepting_lassos(g)
    assert minimax_lasso_sup(pruned2).value == 1
    assert min_limsup_cycle(pruned2).value == 1
