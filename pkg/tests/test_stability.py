from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_tree, tree_curves
from snctwist.errors import PreconditionError
from snctwist.exactnum import Poly, eventual_sign
from snctwist.sncmodel import ClassExpr, chi_union, curve_builder, curve_genus, intersect, synth_generator
from snctwist.stability import (
    e_poly,
    e_value,
    eventually_nonnegative,
    eventually_nonpositive,
    is_semistable,
    kx_criterion,
    twistable_interval,
)

L = ClassExpr.bundle("L")
K = ClassExpr.bundle("K")
m = Poly.var("m")
b = Poly.var("b")


def curve_linear_form(c, Y, Lc, Hc):
    """Closed form A*b + B*m + C of e_Y(L + mH + bY) for a nodal curve."""
    X = c.union_class(range(c.n))
    Yc = c.union_class(Y)
    g_X = curve_genus(c)
    g_Y = 1 - chi_union(c, Y, ClassExpr())
    YY = intersect(c, [Yc, Yc])
    A = YY * (1 - g_X)
    B = intersect(c, [Hc, Yc]) * (1 - g_X) + intersect(c, [Hc, X]) * (g_Y - 1 - YY / 2)
    LX = intersect(c, [Lc, X])
    C = intersect(c, [Lc, Yc]) * (1 - g_X) + LX * (g_Y - 1) - YY / 2 * (LX - g_X + 1)
    return A * b + B * m + C


def random_class(c, rng, span=6):
    return ClassExpr(tuple(rng.randint(-span, span) for _ in range(c.n)), tuple((x, rng.randint(-span, span)) for x in c.bundles))


# --- worked examples -------------------------------------------------------


def test_e_value_fix_c1(fix_c1):
    assert e_value(fix_c1, [0], L) == Fraction(1, 2)
    assert e_value(fix_c1, [0, 1], L) == 0


def test_e_value_fix_c2(fix_c2):
    assert e_value(fix_c2, [0], L) == 0


def test_e_value_empty_union_rejected(fix_c1):
    with pytest.raises(ValueError):
        e_value(fix_c1, [], L)


def test_e_poly_fix_c1(fix_c1):
    assert e_poly(fix_c1, [0], L, K, W=[0]) == 2 * b + Fraction(1, 2)


def test_eventual_conditions_fix_c1(fix_c1):
    assert not eventually_nonpositive(fix_c1, [0], L, K)
    twisted = L + ClassExpr((0, 1))
    assert e_value(fix_c1, [0], twisted) == Fraction(-3, 2)
    assert eventually_nonpositive(fix_c1, [0], twisted, K)
    assert eventually_nonpositive(fix_c1, [0, 1], L, K)
    assert eventually_nonnegative(fix_c1, [0, 1], L, K)


def test_is_semistable_examples(fix_c1):
    assert is_semistable(fix_c1, L + ClassExpr((0, 1)), K, "minus")
    assert not is_semistable(fix_c1, L + ClassExpr((0, 2)), K, "minus")  # degrees (5, 0)
    single = curve_builder([2], [], {"L": [5]})
    assert is_semistable(single, L, K, "minus")
    assert is_semistable(single, L, K, "plus")


def test_interval_fix_c1(fix_c1):
    rep = twistable_interval(fix_c1, [0], L, K, "minus")
    assert rep.is_unit
    assert rep.left == Fraction(-5, 4) and rep.endpoint == Fraction(-1, 4)
    assert rep.left_closed and rep.right_closed
    assert rep.case == "CurveExact"
    assert rep.candidates == (-1,)
    assert rep.cross_check is True


def test_interval_fix_c2(fix_c2):
    rep = twistable_interval(fix_c2, [0], L, K, "minus")
    assert (rep.left, rep.endpoint) == (-1, 0)
    assert rep.left_closed and rep.right_closed
    assert rep.candidates == (-1, 0)
    assert rep.A1 == 3 and rep.A0 == 0


def test_interval_genus_one_is_degenerate():
    c = curve_builder([1, 0], [(0, 1, 1)], {"L": [2, 1]})
    assert curve_genus(c) == 1
    rep = twistable_interval(c, [0], L, K, "minus")
    assert rep.kind == "Degenerate"
    assert "do not depend on b" in rep.reason


def test_interval_rejects_whole_fiber(fix_c1):
    with pytest.raises(ValueError):
        twistable_interval(fix_c1, [0, 1], L, K)
    with pytest.raises(ValueError):
        twistable_interval(fix_c1, [], L, K)


def test_interval_wrong_mode_is_degenerate(fix_c1):
    rep = twistable_interval(fix_c1, [0], L, K, "plus")
    assert rep.kind == "Degenerate"


def test_interval_general_polarization_matches_pointwise():
    # a general polarization on a surface fixture: whatever comes back must be
    # consistent with pointwise evaluation of the two eventual-sign conditions
    c = synth_generator(2, [(0, 1)], 7)
    H = ClassExpr((0, 1), (("K", 1), ("L", 1)))
    rep = twistable_interval(c, [0], L, H, "minus")
    P = e_poly(c, [0], L, H, W=[0])
    Q = e_poly(c, [1], L, H, W=[0])
    for k in range(-40, 41):
        x = Fraction(k, 4)
        inside = eventual_sign(P.subs({"b": x})) <= 0 and eventual_sign(Q.subs({"b": x})) <= 0
        regions = [r for r in rep.regions if _contains(r, x)]
        assert len(regions) == 1 and regions[0].label == inside


def _contains(r, x):
    from snctwist.exactnum import compare

    left = r.lo is None or compare(r.lo, x) < 0 or (r.lo_closed and compare(r.lo, x) == 0)
    right = r.hi is None or compare(x, r.hi) < 0 or (r.hi_closed and compare(x, r.hi) == 0)
    return left and right


def test_kx_criterion_examples(fix_c1):
    r = kx_criterion(fix_c1, [0])
    assert r.value == -4 and r.classification == "MinusTwistable"
    rational = curve_builder([0, 0], [(0, 1, 1)], {"L": [0, 0]})
    r = kx_criterion(rational, [0])
    assert r.value == 2 and r.classification == "PlusTwistable"
    elliptic = curve_builder([1, 0], [(0, 1, 1)], {"L": [0, 0]})
    assert kx_criterion(elliptic, [0]).classification == "Inconclusive"


def test_kx_criterion_needs_canonical(fix_c1):
    from snctwist.sncmodel import Configuration

    c = Configuration(1, fix_c1.components, fix_c1.edges, fix_c1.bundles, fix_c1.intersection,
                      fix_c1.chi_components, fix_c1.chi_edges, None)
    with pytest.raises(PreconditionError):
        kx_criterion(c, [0])


# --- properties ------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(tree_curves(), st.data())
def test_curve_closed_form(c, data):
    if c.n < 2:
        return
    mask = data.draw(st.integers(1, 2**c.n - 2))
    Y = [i for i in range(c.n) if mask >> i & 1]
    assert e_poly(c, Y, L, K, W=Y) == curve_linear_form(c, Y, L, K)
    H = ClassExpr((), (("L", 1), ("K", data.draw(st.integers(-2, 2)))))
    assert e_poly(c, Y, L, H, W=Y) == curve_linear_form(c, Y, L, H)
    # the m-coefficient vanishes for the canonical polarization
    assert e_poly(c, Y, L, K).degree("m") <= 0


@settings(max_examples=60, deadline=None)
@given(tree_curves(), st.integers(0, 10**6))
def test_complement_identity_curves(c, seed):
    rng = random.Random(seed)
    if c.n < 2:
        return
    mask = rng.randint(1, 2**c.n - 2)
    Y = frozenset(i for i in range(c.n) if mask >> i & 1)
    Z = frozenset(range(c.n)) - Y
    M = random_class(c, rng)
    assert e_value(c, Z, M) == -e_value(c, Y, M + c.union_class(Y))


@pytest.mark.parametrize("seed", range(6))
def test_identities_on_surfaces(seed):
    rng = random.Random(seed)
    c = synth_generator(2, random_tree(rng, rng.randint(2, 4)), seed)
    allc = frozenset(range(c.n))
    for _ in range(15):
        M = random_class(c, rng)
        mask = rng.randint(1, 2**c.n - 2)
        Y = frozenset(i for i in range(c.n) if mask >> i & 1)
        assert e_value(c, allc - Y, M) == -e_value(c, Y, M + c.union_class(Y))
        assert e_value(c, allc, M) == 0
        assert e_value(c, Y, M + c.union_class(allc)) == e_value(c, Y, M)
        parts = c.connected_parts(Y)
        assert sum(e_value(c, p, M) for p in parts) == e_value(c, Y, M)
        J = c.boundary(Y)
        tw = [rng.randint(-3, 3) for _ in range(c.n)]
        far = ClassExpr(tuple(t if i in J else 0 for i, t in enumerate(tw)))
        assert e_value(c, Y, M + ClassExpr(tuple(tw))) == e_value(c, Y, M + far)


@settings(max_examples=40, deadline=None)
@given(tree_curves(), st.integers(0, 10**6))
def test_e_poly_matches_e_value(c, seed):
    rng = random.Random(seed)
    if c.n < 2:
        return
    mask = rng.randint(1, 2**c.n - 2)
    Y = [i for i in range(c.n) if mask >> i & 1]
    H = random_class(c, rng, 3)
    P = e_poly(c, Y, L, H, W=Y)
    mm, bb = rng.randint(-5, 5), rng.randint(-5, 5)
    M = L + mm * H + bb * c.union_class(Y)
    assert P(m=mm, b=bb) == e_value(c, Y, M)


@settings(max_examples=50, deadline=None)
@given(tree_curves(max_n=5))
def test_connectivity_reduction(c):
    for mode in ("minus", "plus"):
        assert is_semistable(c, L, K, mode, "connected_pairs") == is_semistable(c, L, K, mode, "all_unions")


@pytest.mark.parametrize("seed", range(5))
def test_degree_bounds_surfaces(seed):
    rng = random.Random(seed)
    c = synth_generator(2, random_tree(rng, 3), seed)
    d = c.d
    for Y in c.proper_unions():
        P = e_poly(c, Y, L, K, W=Y)
        coeffs = P.coeffs("b")
        for i, A in enumerate(coeffs):
            assert A.degree("m") <= 2 * d - 1 - i


@settings(max_examples=60, deadline=None)
@given(tree_curves(), st.sampled_from(["minus", "plus"]))
def test_interval_invariants(c, mode):
    if c.n < 2:
        return
    Y = [i for i in range(c.n) if i != 0 and c.is_connected(set(range(c.n)) - {i})][:1] or [c.n - 1]
    rep = twistable_interval(c, Y, L, K, mode)
    if rep.is_unit:
        assert rep.left + 1 == rep.endpoint
        expected = [k for k in range(-100, 100) if (rep.left < k or (rep.left_closed and k == rep.left))
                    and (k < rep.endpoint or (rep.right_closed and k == rep.endpoint))]
        assert list(rep.candidates) == expected
        assert rep.cross_check is True
        flags = {"Case1": (False, True), "Case2": (True, False), "Case3": (True, True), "CurveExact": (True, True)}
        assert flags[rep.case] == (rep.left_closed, rep.right_closed)
