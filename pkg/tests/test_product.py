"""Synchronized product, game arena, and restriction products."""

import pytest

from omegarepair import build_arena, build_product, output_product
from omegarepair.core import NBA
from omegarepair.product import extended_moves, restrict_domain

from conftest import domain_restricted


def test_printer_product_shape(printer_kripke, printer_rm, printer_spec):
    g = build_product(printer_kripke, printer_rm, printer_spec)
    assert len(g.vertices) == 30
    assert len(g.edges) == 116
    assert g.initial and g.initial <= g.vertices
    assert g.final and g.final <= g.vertices
    for v in g.initial:
        assert v.counter == 1
        assert v.kripke in printer_kripke.initial
        assert v.rm in printer_rm.initial
        assert v.nba in printer_spec.initial
    for v in g.final:
        assert v.counter == 2 and v.nba in printer_spec.accepting
    assert all(e.weight >= 0 for e in g.edges)


def test_printer_arena_shape(printer_kripke, printer_rm, printer_spec):
    g = build_product(printer_kripke, printer_rm, printer_spec)
    arena = build_arena(g)
    assert len(arena.vertices) == 46
    assert len(arena.edges) == 160
    assert arena.min_vertices | arena.max_vertices == arena.vertices
    assert not (arena.min_vertices & arena.max_vertices)
    for v in arena.max_vertices:
        assert v.counter == 3
    emap = arena.edge_map()
    # Max moves carry no weight; Min moves carry the product edge weight
    for v in arena.max_vertices:
        assert all(e.weight == 0 for e in emap[v])
    # every Min vertex alternates into a Max vertex
    for v in arena.min_vertices:
        for e in emap[v]:
            assert e.dst in arena.max_vertices


def test_extended_moves(printer_spec):
    # p1 reads sq.tr through p2 into p4, traversing the accepting state p4
    moves = extended_moves(printer_spec, "p1", ("sq", "tr"))
    assert any(m.dst for m in moves)
    for m in moves:
        assert m.src == "p1" and m.word == ("sq", "tr")
    # the empty word stays in place without visiting anything
    stay = extended_moves(printer_spec, "p1", ())
    assert len(stay) == 1
    (m,) = stay
    assert m.dst == "p1" and not m.visits_accepting


def test_restrict_domain_alphabet_guard(printer_rm):
    wrong = NBA(states=frozenset({"u"}), alphabet=frozenset({"zz"}),
                initial=frozenset({"u"}), accepting=frozenset({"u"}),
                transitions=frozenset({("u", "zz", "u")}))
    with pytest.raises(ValueError):
        restrict_domain(printer_rm, wrong)


def test_domain_restriction_preserves_aggregator(printer_kripke, printer_rm):
    tq = domain_restricted(printer_kripke, printer_rm)
    assert tq.aggregator == printer_rm.aggregator
    assert tq.states  # the printer machine reads every printer trace


def test_output_product(dsuminf_kripke, dsuminf_rm, dsuminf_bad):
    tq = domain_restricted(dsuminf_kripke, dsuminf_rm)
    t2 = output_product(tq, dsuminf_bad)
    assert t2.aggregator == dsuminf_rm.aggregator
    assert t2.states
    # costs are inherited from the machine, not the automaton
    assert {tr.cost for tr in t2.transitions} <= \
        {tr.cost for tr in dsuminf_rm.transitions}


def test_product_rejects_invalid_models(printer_kripke, printer_rm,
                                        printer_spec):
    from dataclasses import replace
    from omegarepair.core import ModelError
    broken = replace(printer_kripke, initial=frozenset({"ghost"}))
    with pytest.raises(ModelError):
        build_product(broken, printer_rm, printer_spec)
