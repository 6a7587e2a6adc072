"""Adversarial impairment thresholds and epsilon-witnesses."""

from fractions import Fraction

import pytest

from omegarepair import (Aggregator, AggregatorKind, impair_threshold,
                         impair_witness)
from omegarepair.impair import (ImpairError, alternation_mean,
                                impair_threshold_graph, impair_witness_graph,
                                mean_round_index)
from omegarepair.results import Attainment, MemoryClass

from conftest import mkgraph, vtx

F = Fraction


def delayed_graph():
    p0, p1, p2 = vtx("p0"), vtx("p1"), vtx("p2")
    return mkgraph([(p0, p1, 1), (p1, p1, 0), (p1, p2, 1), (p2, p2, 1)],
                   [p0], [p2])


def test_graph_thresholds_per_aggregator():
    g = delayed_graph()
    for kind in (AggregatorKind.SUP, AggregatorKind.LIMSUP,
                 AggregatorKind.MEAN):
        res = impair_threshold_graph(g, Aggregator(kind))
        assert res.value == 1
        assert res.attainment is Attainment.ATTAINED
    dsum = impair_threshold_graph(g, Aggregator(AggregatorKind.DSUM, F(1, 2)))
    assert dsum.value == 1
    assert dsum.attainment is Attainment.INFIMUM_ONLY
    assert dsum.memory is MemoryClass.FINITE


def test_graph_infinite_and_witness_refusal():
    p0 = vtx("p0")
    g = mkgraph([(p0, p0, 1)], [p0], [vtx("far")])
    res = impair_threshold_graph(g, Aggregator(AggregatorKind.SUP))
    assert res.infinite
    assert res.good_set == "(0, oo)"  # no impairment at any threshold
    with pytest.raises(ImpairError):
        impair_witness_graph(g, Aggregator(AggregatorKind.SUP), None)


def test_dsum_witness_family(dsuminf_kripke, dsuminf_rm, dsuminf_bad):
    for eps, expected in ((F(1, 2), F(3, 2)), (F(1, 8), F(9, 8)),
                          (F(1, 32), F(33, 32))):
        wit = impair_witness(dsuminf_kripke, dsuminf_rm, dsuminf_bad, eps)
        assert wit.cost <= 1 + eps
        assert wit.cost == expected  # tightest member of the 1 + 2^-i family


def test_witness_serialization(dsuminf_kripke, dsuminf_rm, dsuminf_bad):
    wit = impair_witness(dsuminf_kripke, dsuminf_rm, dsuminf_bad, F(1, 8))
    text = wit.serialize()
    lines = text.splitlines()
    assert lines[0].startswith("TRACE ")
    assert lines[1].startswith("REWRITE ")
    assert lines[2].startswith("RUN ")
    assert lines[3] == "COST 9/8"
    # the witness cost is the aggregated value of its own rewrite cost lasso
    assert wit.trace is not None and wit.rewrite is not None


def test_mean_witness_round_alternation():
    v0, v1 = vtx("v0"), vtx("v1")
    g = mkgraph([(v0, v0, 0), (v0, v1, 1), (v1, v0, 1), (v1, v1, 1)],
                [v0], [v1])
    agg = Aggregator(AggregatorKind.MEAN)
    for eps, mean in ((F(1, 2), F(1, 2)), (F(1, 4), F(1, 5)),
                      (F(1, 10), F(1, 17))):
        wit = impair_witness_graph(g, agg, eps)
        assert wit.cost == mean
        assert wit.cost <= eps


def test_alternation_mean_properties():
    # the alternation mean decreases toward the cheap cycle's mean
    d1, n1, d2, n2 = 0, 1, 2, 1
    values = [alternation_mean(i, d1, n1, d2, n2) for i in range(1, 10)]
    assert values == sorted(values, reverse=True)
    assert values[-1] < values[0]
    for eps in (F(1, 3), F(1, 7), F(1, 100)):
        i = mean_round_index(d1, n1, d2, n2, eps)
        assert abs(alternation_mean(i, d1, n1, d2, n2) - F(d1, n1)) <= eps


def test_fixture_threshold(dsuminf_kripke, dsuminf_rm, dsuminf_bad):
    res = impair_threshold(dsuminf_kripke, dsuminf_rm, dsuminf_bad)
    assert str(res) == "TAU* 1/1 INFIMUM_ONLY FINITE"
    assert res.bad_set == "[1/1, oo)"
    assert res.good_set == "(0, 1/1)"
