"""Omega-regular mask synthesis and its automaton toolbox."""

import random
from dataclasses import replace
from fractions import Fraction

import pytest

from omegarepair import (Aggregator, AggregatorKind, Lasso, complement_nba,
                         lasso_membership, mask_synthesize)
from omegarepair.core import NBA
from omegarepair.mask import (MaskError, discount_tail_bound, dsum_mask_depth,
                              intersect_nba, rm_domain_nba, trim_nba, trim_rm)

F = Fraction
A_OMEGA = Lasso((), ("a",))


def test_refusals(dsuminf_kripke, dsuminf_rm, dsuminf_bad):
    mean_rm = replace(dsuminf_rm, aggregator=Aggregator(AggregatorKind.MEAN))
    with pytest.raises(MaskError) as exc:
        mask_synthesize(dsuminf_kripke, mean_rm, dsuminf_bad, F(1))
    assert exc.value.code == "UNDECIDABLE_MEAN_MASK"
    with pytest.raises(MaskError) as exc:
        mask_synthesize(dsuminf_kripke, dsuminf_rm, dsuminf_bad, F(1))
    assert exc.value.code == "BAD_EPSILON"  # DSUM masks need an epsilon


def test_dsum_mask_threshold_sides(dsuminf_kripke, dsuminf_rm, dsuminf_bad):
    # rewritings of a^w cost down to (but excluding) 1: at tau = 3/2 the
    # trace is compromised, at tau = 1/2 it is safe
    unsafe = mask_synthesize(dsuminf_kripke, dsuminf_rm, dsuminf_bad,
                             F(3, 2), F(1, 4))
    assert not lasso_membership(unsafe, A_OMEGA)
    assert len(unsafe.states) == 0  # the only trace is gone: empty mask
    safe = mask_synthesize(dsuminf_kripke, dsuminf_rm, dsuminf_bad,
                           F(1, 2), F(1, 4))
    assert lasso_membership(safe, A_OMEGA)


def test_sup_and_limsup_masks(dsuminf_kripke, dsuminf_rm, dsuminf_bad):
    for kind in (AggregatorKind.SUP, AggregatorKind.LIMSUP):
        rm = replace(dsuminf_rm, aggregator=Aggregator(kind))
        # every rewriting of a^w has sup = limsup = 1
        low = mask_synthesize(dsuminf_kripke, rm, dsuminf_bad, F(1, 2))
        assert lasso_membership(low, A_OMEGA)
        high = mask_synthesize(dsuminf_kripke, rm, dsuminf_bad, F(1))
        assert not lasso_membership(high, A_OMEGA)


def _nba(states, alphabet, initial, accepting, transitions):
    return NBA(frozenset(states), frozenset(alphabet), frozenset(initial),
               frozenset(accepting), frozenset(transitions))


def test_complement_extremes():
    empty = _nba({"e"}, {"a"}, {"e"}, set(), {("e", "a", "e")})
    assert lasso_membership(complement_nba(empty), A_OMEGA)
    universal = _nba({"u"}, {"a"}, {"u"}, {"u"}, {("u", "a", "u")})
    comp = complement_nba(universal)
    assert not comp.states  # complement of everything is the empty automaton
    assert not lasso_membership(comp, A_OMEGA)


def test_complement_xor_random():
    rng = random.Random(17)
    for _ in range(8):
        size = rng.randint(1, 4)
        states = [f"s{i}" for i in range(size)]
        trans = {(q, s, rng.choice(states))
                 for q in states for s in "xy" for _ in range(rng.randint(0, 2))}
        a = _nba(states, {"x", "y"}, {states[0]},
                 {q for q in states if rng.random() < 0.5}, trans)
        c = complement_nba(a)
        for _ in range(25):
            w = Lasso(tuple(rng.choice("xy")
                            for _ in range(rng.randint(0, 2))),
                      tuple(rng.choice("xy") for _ in range(rng.randint(1, 3))))
            assert lasso_membership(a, w) != lasso_membership(c, w)


def test_complement_size_gate():
    states = [f"s{i}" for i in range(13)]
    big = _nba(states, {"a"}, {states[0]}, {states[0]},
               {(states[i], "a", states[(i + 1) % 13]) for i in range(13)})
    with pytest.raises(MaskError) as exc:
        complement_nba(big)
    assert exc.value.code == "SIZE_LIMIT"


def test_intersection():
    universal = _nba({"u"}, {"a"}, {"u"}, {"u"}, {("u", "a", "u")})
    empty = _nba({"e"}, {"a"}, {"e"}, set(), {("e", "a", "e")})
    assert lasso_membership(intersect_nba(universal, universal), A_OMEGA)
    assert not lasso_membership(intersect_nba(universal, empty), A_OMEGA)


def test_trimming(dsuminf_rm):
    empty = _nba({"e"}, {"a"}, {"e"}, set(), {("e", "a", "e")})
    assert not trim_nba(empty).states  # no accepting lasso anywhere
    assert trim_rm(dsuminf_rm).states == dsuminf_rm.states


def test_domain_automaton(dsuminf_rm):
    dom = rm_domain_nba(dsuminf_rm)
    assert lasso_membership(dom, A_OMEGA)


def test_depth_and_tail_bound():
    lam, wmax = F(1, 2), 4
    assert discount_tail_bound(lam, wmax, 0) == 8
    assert discount_tail_bound(lam, wmax, 3) == 1
    for eps in (F(1), F(1, 4), F(1, 16)):
        n = dsum_mask_depth(lam, wmax, eps)
        assert discount_tail_bound(lam, wmax, n) <= eps / 2
        assert n == 0 or discount_tail_bound(lam, wmax, n - 1) > eps / 2
    assert dsum_mask_depth(lam, 0, F(1, 100)) == 0
