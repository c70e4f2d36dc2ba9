from __future__ import annotations

from fractions import Fraction

import pytest

from conftest import random_curves
from snctwist.errors import PreconditionError
from snctwist.exactnum import Poly
from snctwist.sncmodel import ClassExpr, Configuration, curve_builder, synth_generator
from snctwist.stability import is_semistable
from snctwist.twistenum import Twist, enumerate_semistable_twists
from snctwist.oracle import (
    balanced_check,
    brute_force_twists,
    degree_bound_battery,
    eq1,
    identity_battery,
    m_threshold,
    m_threshold_poly,
    oracle_window,
)

L = ClassExpr.bundle("L")
K = ClassExpr.bundle("K")
m = Poly.var("m")


def test_brute_force_fixtures(fix_c1, fix_c2):
    assert brute_force_twists(fix_c1, L, K, "minus", 10) == {Twist((0, 1))}
    assert brute_force_twists(fix_c2, L, K, "minus", 10) == {Twist((0, 0)), Twist((0, 1))}


def test_brute_force_zero_window(fix_c1, fix_c2):
    assert brute_force_twists(fix_c1, L, K, "minus", 0) == set()
    assert brute_force_twists(fix_c2, L, K, "minus", 0) == {Twist((0, 0))}


def test_brute_force_size_guard():
    c = curve_builder([2] * 13, [(i, i + 1, 1) for i in range(12)], {"L": [0] * 13})
    with pytest.raises(PreconditionError):
        brute_force_twists(c, L, K, "minus", 1)


def test_independent_evaluator_fix_c1(fix_c1):
    assert eq1(fix_c1, [0], fix_c1.vector(L)) == Fraction(1, 2)


def test_balanced_examples(fix_c1, fix_c2):
    rows = {tuple(sorted(r.union)): r for r in balanced_check(fix_c1, L + ClassExpr((0, 1)))}
    assert rows[(0,)].balanced and rows[(0,)].bound == Fraction(13, 4)
    assert rows[(1,)].balanced and rows[(1,)].bound == Fraction(3, 4)
    rows = {tuple(sorted(r.union)): r for r in balanced_check(fix_c1, L)}
    assert not rows[(0,)].balanced
    rows = {tuple(sorted(r.union)): r for r in balanced_check(fix_c2, L)}
    assert rows[(0,)].balanced and rows[(0,)].d_Y == rows[(0,)].bound == 1
    assert all(r.agrees for r in rows.values())


def test_balanced_needs_genus_two():
    c = curve_builder([1, 0], [(0, 1, 1)], {"L": [1, 1]})
    with pytest.raises(PreconditionError):
        balanced_check(c, L)


def test_identity_battery_passes(fix_c1):
    rep = identity_battery(fix_c1, 100, seed=1)
    assert rep.ok
    assert rep.checks["complement_identity"] == 100


def test_identity_battery_single_component():
    c = curve_builder([2], [], {"L": [3]})
    rep = identity_battery(c, 10, seed=0)
    assert rep.ok and "complement_identity" not in rep.checks


def test_identity_battery_catches_corruption():
    good = synth_generator(2, [(0, 1)], 7)
    key = next(k for k in sorted(good.intersection) if 0 in k and 1 in k)
    table = dict(good.intersection)
    table[key] += 1
    bad = Configuration(2, good.components, good.edges, good.bundles, table,
                        good.chi_components, good.chi_edges, good.canonical)
    rep = identity_battery(bad, 40, seed=2)
    assert not rep.ok
    assert any(f["check"] == "complement_identity" for f in rep.failures)
    assert rep.to_record()["reproducer"]


def test_degree_bounds_curve(fix_c1):
    rep = degree_bound_battery(fix_c1, [0], L)
    assert rep.ok and "surface_quadratic" not in rep.checks


def test_degree_bounds_surface_closed_form():
    c = synth_generator(2, [(0, 1)], 7)
    rep = degree_bound_battery(c, [0], L)
    assert rep.ok and rep.checks["surface_quadratic"] == 1


def test_degree_bounds_general_polarization():
    c = synth_generator(2, [(0, 1)], 7)
    H = ClassExpr((1, 0), (("K", 2), ("L", 1)))
    rep = degree_bound_battery(c, [0], L, H)
    assert rep.ok
    assert set(rep.checks) == {"lemma_bound", "b_degree"}


def test_thresholds(fix_c1):
    t = m_threshold(fix_c1, [0], L, K)
    assert (t.m0, t.sign) == (1, 1) and t.verified
    t = m_threshold_poly(1000 - m)
    assert (t.m0, t.sign) == (1001, -1) and t.verified
    t = m_threshold_poly(Poly())
    assert (t.m0, t.sign) == (1, 0)


def test_threshold_irrational_root():
    t = m_threshold_poly(m**2 - 2 * m - 7)  # roots 1 +- 2*sqrt(2)
    assert t.m0 == 4 and t.sign == 1 and t.verified
    assert t.bound >= 4


@pytest.mark.parametrize("c", random_curves(seed=3, count=25, min_genus=2, max_n=5))
def test_enumeration_matches_brute_force(c):
    res = enumerate_semistable_twists(c, L, K)
    W = oracle_window(res.trace.intervals())
    assert brute_force_twists(c, L, K, "minus", W) == res.as_set()


@pytest.mark.parametrize("c", random_curves(seed=4, count=25, min_genus=2, max_n=5))
def test_balanced_matches_e_sign(c):
    rows = balanced_check(c, L)
    assert all(r.agrees for r in rows)
    assert is_semistable(c, L, K, "minus", "all_unions") == all(r.balanced for r in rows)
