"""Brute-force oracles and the solver agreement sweep."""

from dataclasses import replace
from fractions import Fraction

from omegarepair import (Aggregator, AggregatorKind, Lasso, OracleBudget,
                         bounded_bad_rewrite, brute_impair_threshold,
                         brute_repair_threshold, enumerate_accepting_lassos,
                         oracle_report, random_instance)
from omegarepair.oracle import accepting_run_costs, single_player_values

from conftest import domain_restricted, mkgraph, vtx

F = Fraction


def test_random_instance_deterministic():
    for seed in (0, 5, 42):
        assert random_instance(seed) == random_instance(seed)
    assert random_instance(1) != random_instance(2)


def test_single_player_values_delayed_dsum():
    p0, p1, p2 = vtx("p0"), vtx("p1"), vtx("p2")
    edges = [(p0, p1, 1), (p1, p1, 0), (p1, p2, 1), (p2, p2, 1)]
    vals = single_player_values({p0, p1, p2}, edges, {p2}, p0, F(1, 2),
                                OracleBudget())
    # DSum can defer the accepting loop: infimum 1 approached via p1 delays
    assert vals[AggregatorKind.DSUM] == 1
    assert vals[AggregatorKind.SUP] == 1
    assert vals[AggregatorKind.LIMSUP] == 1
    assert vals[AggregatorKind.MEAN] == 1
    vals1 = single_player_values({p0, p1, p2}, edges, {p2}, p1, F(1, 2),
                                 OracleBudget())
    assert vals1[AggregatorKind.DSUM] == 0  # loop at p1 costs nothing


def test_enumerate_accepting_lassos():
    p0, p1 = vtx("p0"), vtx("p1")
    g = mkgraph([(p0, p1, 1), (p1, p0, 2), (p1, p1, 3)], [p0], [p1])
    lassos = list(enumerate_accepting_lassos(g, OracleBudget()))
    assert lassos
    for lasso in lassos:
        assert set(lasso.cycle) & {p1}  # every cycle meets the final vertex


def test_accepting_run_costs_eg1(eg1_rm):
    word = Lasso(("b", "a"), ("a", "b"))
    costs = accepting_run_costs(eg1_rm, word)
    assert F(3) in costs
    assert costs == sorted(costs)


def test_bounded_bad_rewrite_walk_prefixes(dsuminf_kripke, dsuminf_rm,
                                           dsuminf_bad):
    tq = domain_restricted(dsuminf_kripke, dsuminf_rm)
    word = Lasso((), ("a",))
    # rewriting costs form the family 1 + 2^-i: any tau > 1 admits a
    # witness whose cheap prefix repeats a state, tau <= 1 does not
    for tau in (F(3, 2), F(9, 8), F(33, 32)):
        run = bounded_bad_rewrite(tq, dsuminf_bad, word, tau)
        assert run is not None
    assert bounded_bad_rewrite(tq, dsuminf_bad, word, F(1)) is None
    assert bounded_bad_rewrite(tq, dsuminf_bad, word, F(1, 2)) is None


def test_brute_thresholds_match_printer(printer_kripke, printer_rm,
                                        printer_spec):
    assert brute_repair_threshold(printer_kripke, printer_rm,
                                  printer_spec) == 0
    sup_rm = replace(printer_rm, aggregator=Aggregator(AggregatorKind.SUP))
    assert brute_repair_threshold(printer_kripke, sup_rm, printer_spec) == 3


def test_brute_impair_matches_graph_value():
    from omegarepair.impair import impair_threshold_graph
    p0, p1, p2 = vtx("p0"), vtx("p1"), vtx("p2")
    g = mkgraph([(p0, p1, 1), (p1, p1, 0), (p1, p2, 1), (p2, p2, 1)],
                [p0], [p2])
    for agg in (Aggregator(AggregatorKind.SUP),
                Aggregator(AggregatorKind.MEAN),
                Aggregator(AggregatorKind.DSUM, F(1, 2))):
        assert brute_impair_threshold(g, agg, OracleBudget()) == \
            impair_threshold_graph(g, agg).value


def test_oracle_report_format():
    lines = oracle_report(3)
    assert len(lines) == 8  # four aggregators, repair and impair
    for line in lines:
        assert line.startswith("SEED 3 AGG ")
        assert "SOLVER" in line and "ORACLE" in line
        assert line.endswith("VERDICT OK")
