from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_tree, tree_curves
from snctwist.errors import ConfigError
from snctwist.sncmodel import (
    ClassExpr,
    Configuration,
    chi_union,
    curve_builder,
    curve_genus,
    emit_config,
    intersect,
    parse_config,
    synth_generator,
    validate,
)

L = ClassExpr.bundle("L")
Y1 = ClassExpr.components([0])
Y2 = ClassExpr.components([1])


def two_component_curve(table):
    return Configuration(
        dimension=1,
        components=("Y1", "Y2"),
        edges=((0, 1),),
        bundles=("L",),
        intersection=table,
        chi_components=({}, {}),
        chi_edges={(0, 1): {(): 1}},
    )


def test_fix_c1_intersections(fix_c1):
    assert intersect(fix_c1, [L, Y1]) == 3
    assert intersect(fix_c1, [Y1, Y2]) == 1
    assert intersect(fix_c1, [Y1, Y1]) == -1
    X = ClassExpr((1, 1))
    assert intersect(fix_c1, [X, X]) == 0


def test_fix_c1_euler_characteristics(fix_c1):
    # Riemann-Roch on each component: deg + 1 - g
    assert chi_union(fix_c1, [0], L) == 3 + 1 - 2
    assert chi_union(fix_c1, ["Y1", "Y2"], L) == 2 + 2 - 1
    assert chi_union(fix_c1, [0, 1], ClassExpr()) == -2
    assert curve_genus(fix_c1) == 3
    K = ClassExpr.bundle("K")
    assert intersect(fix_c1, [K, ClassExpr((1, 1))]) == 4


def test_fix_c1_validates(fix_c1):
    rep = validate(fix_c1)
    assert rep.ok, rep.failed()
    assert {c.name for c in rep.checks} >= {
        "connected",
        "adjacency_vanishing",
        "x_squared",
        "mayer_vietoris",
        "riemann_roch_top",
    }


def test_single_component_curve_valid():
    c = curve_builder([2], [], {"L": [5]})
    assert validate(c).ok
    assert c.n == 1 and c.edges == ()


def test_triangle_builds_but_is_not_a_tree():
    c = curve_builder([1, 1, 1], [(0, 1, 1), (1, 2, 1), (0, 2, 1)], {"L": [0, 0, 0]})
    assert validate(c).ok
    assert not c.is_tree()


def test_x_squared_failure_detected():
    c = two_component_curve({(0, 0): -1, (0, 1): 2, (1, 1): -1})
    rep = validate(c)
    assert not rep["x_squared"].passed
    assert "Y1" in rep["x_squared"].witness


def test_adjacency_failure_detected():
    c = Configuration(
        dimension=1,
        components=("Y1", "Y2", "Y3"),
        edges=((0, 1), (1, 2)),
        bundles=(),
        intersection={(0, 2): 1, (0, 1): 1, (1, 2): 1, (0, 0): -2, (1, 1): -2, (2, 2): -2},
        chi_components=({}, {}, {}),
        chi_edges={},
    )
    rep = validate(c)
    assert not rep["adjacency_vanishing"].passed


def test_corrupted_chi_breaks_mayer_vietoris(fix_c1):
    chis = list(fix_c1.chi_components)
    chis[0] = {**chis[0], (0,): chis[0][(0,)] + 1}
    bad = Configuration(
        1, fix_c1.components, fix_c1.edges, fix_c1.bundles, fix_c1.intersection, tuple(chis), fix_c1.chi_edges, "K"
    )
    assert not validate(bad).ok


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda d: d.update(extra=1), "unknown field"),
        (lambda d: d["edges"].append({"i": "Y1", "j": "Y9"}), "unknown component"),
        (lambda d: d["intersection"].append({"monomial": ["L", "Q"], "value": "1"}), "unknown symbol"),
        (lambda d: d["intersection"].append({"monomial": ["Y1"], "value": "1"}), "symbols"),
        (lambda d: d["intersection"].append({"monomial": ["L", "K"], "value": "1"}), "no component"),
        (lambda d: d["intersection"][0].update(value="1/0"), "bad rational"),
    ],
)
def test_malformed_files_rejected(fix_c1, mutate, message):
    doc = json.loads(emit_config(fix_c1))
    mutate(doc)
    with pytest.raises(ConfigError, match=message):
        parse_config(json.dumps(doc))


def test_intersect_needs_a_component_argument(fix_c1):
    with pytest.raises(ValueError):
        intersect(fix_c1, [L, ClassExpr.bundle("K")])
    with pytest.raises(ValueError):
        intersect(fix_c1, [L])


def test_chi_union_rejects_empty(fix_c1):
    with pytest.raises(ValueError):
        chi_union(fix_c1, [], L)


def test_curve_builder_errors():
    with pytest.raises(ConfigError):
        curve_builder([1, 1], [], {})
    with pytest.raises(ConfigError):
        curve_builder([1, 1], [(0, 1, 0)], {})
    with pytest.raises(ConfigError):
        curve_builder([1, 1], [(0, 1, -1)], {})


def test_parse_class(fix_c1):
    assert fix_c1.parse_class("L+2*Y1-K") == L + 2 * Y1 - ClassExpr.bundle("K")
    assert fix_c1.parse_class("3L - Y2") == 3 * L - Y2
    with pytest.raises(ConfigError):
        fix_c1.parse_class("L+Q")
    with pytest.raises(ConfigError):
        fix_c1.parse_class("L/2")


def test_synth_examples():
    c = synth_generator(2, [(0, 1)], 7)
    assert validate(c).ok
    assert emit_config(c) == emit_config(synth_generator(2, [(0, 1)], 7))
    c1 = synth_generator(1, [(0, 1), (1, 2)], 3)
    assert c1.d == 1 and validate(c1).ok


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("seed", range(4))
def test_synth_outputs_validate(d, seed):
    rng = random.Random(seed)
    tree = random_tree(rng, rng.randint(2, 3 if d == 3 else 4))
    c = synth_generator(d, tree, seed)
    assert validate(c).ok
    assert c.is_tree()
    assert parse_config(emit_config(c)) == c


def test_synth_rejects_non_tree():
    with pytest.raises(ConfigError):
        synth_generator(2, [(0, 1), (1, 2), (0, 2)], 0)


@settings(max_examples=40, deadline=None)
@given(tree_curves())
def test_round_trip_curves(c):
    text = emit_config(c)
    again = parse_config(text)
    assert again == c
    assert emit_config(again) == text


@settings(max_examples=40, deadline=None)
@given(tree_curves(), st.data())
def test_curve_intersection_invariants(c, data):
    assert validate(c).ok
    for i in range(c.n):
        for j in range(c.n):
            if i != j:
                assert intersect(c, [ClassExpr.components([i]), ClassExpr.components([j])]) >= 0
    if c.n > 1:
        mask = data.draw(st.integers(1, 2**c.n - 2))
        Y = [i for i in range(c.n) if mask >> i & 1]
        Yc = c.union_class(Y)
        Zc = c.union_class([i for i in range(c.n) if i not in Y])
        assert -intersect(c, [Yc, Yc]) == intersect(c, [Yc, Zc])


@settings(max_examples=30, deadline=None)
@given(tree_curves(), st.data())
def test_intersect_is_multilinear(c, data):
    ints = st.integers(-5, 5)

    def cls():
        comp = tuple(data.draw(ints) for _ in range(c.n))
        return ClassExpr(comp, tuple((b, data.draw(ints)) for b in c.bundles))

    M, N, P = cls(), cls(), ClassExpr.components([0])
    a, a2 = data.draw(ints), data.draw(ints)
    lhs = intersect(c, [a * M + a2 * N, P])
    assert lhs == a * intersect(c, [M, P]) + a2 * intersect(c, [N, P])
    assert intersect(c, [M, P]) == intersect(c, [P, M])


def test_surface_multilinear_and_symmetric():
    c = synth_generator(2, [(0, 1), (1, 2)], 11)
    rng = random.Random(5)
    for _ in range(20):
        vecs = [ClassExpr(tuple(rng.randint(-3, 3) for _ in range(3)), (("L", rng.randint(-3, 3)),)) for _ in range(3)]
        vecs[2] = ClassExpr(vecs[2].comp or (1,))
        base = intersect(c, vecs)
        assert intersect(c, [vecs[1], vecs[2], vecs[0]]) == base
        assert intersect(c, [2 * vecs[0], vecs[1], vecs[2]]) == 2 * base


def test_emitted_values_are_exact_strings():
    c = synth_generator(2, [(0, 1)], 7)
    doc = json.loads(emit_config(c))
    vals = [e["value"] for e in doc["intersection"]]
    assert all(isinstance(v, str) for v in vals)
    assert all(Fraction(v) for v in vals)
