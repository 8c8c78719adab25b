import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from freecoarse.coarse import (
    Entourage,
    MetricError,
    Window,
    WindowMismatch,
    ball,
    bounded_filtration,
    check_asymorphism,
    check_coarse_equivalence_witness,
    coarse_modulus,
    compose,
    diagonal_filtration,
    grid_filtration,
    inverse,
    is_bounded,
    is_connected,
    is_large,
    metric_filtration,
    path_filtration,
    power,
    product,
    restrict,
    symmetrize,
    table_filtration,
)


def compose_oracle(e_pairs, d_pairs):
    """Relational composition by brute force: (x, z) with a witness y."""
    return {(x, z) for (x, y) in e_pairs for (y2, z) in d_pairs if y == y2}


W4 = Window(range(4))


def band(window, k):
    return Entourage.from_pairs(window, [(a, b) for a in window for b in window if abs(a - b) <= k])


@st.composite
def reflexive_relations(draw, n=5):
    w = Window(range(n))
    extra = draw(st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=n * n))
    return Entourage.from_pairs(w, set(extra) | {(i, i) for i in range(n)})


# --- entourage algebra -----------------------------------------------------------------


def test_compose_band_with_itself():
    assert compose(band(W4, 1), band(W4, 1)) == band(W4, 2)


def test_compose_diagonal_is_identity():
    d = Entourage.from_pairs(W4, [(0, 0), (1, 1), (2, 2), (3, 3), (0, 3)])
    assert compose(Entourage.diagonal(W4), d) == d


def test_compose_full_absorbs():
    assert compose(Entourage.full(W4), Entourage.diagonal(W4)) == Entourage.full(W4)


def test_compose_rejects_mixed_windows():
    with pytest.raises(WindowMismatch):
        compose(Entourage.diagonal(W4), Entourage.diagonal(Window(range(3))))


def test_inverse_and_symmetrize_single_pair():
    e = Entourage.from_pairs(W4, [(0, 1)] + [(i, i) for i in range(4)])
    assert set(inverse(e).pairs()) == {(1, 0)} | {(i, i) for i in range(4)}
    assert set(symmetrize(e).pairs()) == {(0, 1), (1, 0)} | {(i, i) for i in range(4)}


def test_ball_on_path():
    e = band(Window(range(8)), 2)
    assert ball(3, e) == {1, 2, 3, 4, 5}
    assert ball(3, Entourage.diagonal(Window(range(8)))) == {3}


@settings(max_examples=60, deadline=None)
@given(reflexive_relations(), reflexive_relations())
def test_compose_matches_oracle(e, d):
    assert set(compose(e, d).pairs()) == compose_oracle(e.pairs(), d.pairs())


@settings(max_examples=60, deadline=None)
@given(reflexive_relations(), reflexive_relations(), reflexive_relations())
def test_compose_associative(e, d, c):
    assert compose(compose(e, d), c) == compose(e, compose(d, c))


@settings(max_examples=60, deadline=None)
@given(reflexive_relations())
def test_inverse_involution_and_symmetrize(e):
    assert inverse(inverse(e)) == e
    s = symmetrize(e)
    assert inverse(s) == s
    assert e <= s
    if e.is_symmetric():
        assert s == e


@settings(max_examples=40, deadline=None)
@given(reflexive_relations(), st.integers(0, 4))
def test_power_is_iterated_compose(e, n):
    expected = Entourage.diagonal(e.window)
    for _ in range(n):
        expected = compose(expected, e)
    assert power(e, n) == expected


def test_entourage_json_roundtrip():
    e = band(W4, 1)
    assert Entourage.from_pairs(W4, [tuple(p) for p in e.to_json()]) == e


# --- filtrations -----------------------------------------------------------------------


def test_metric_path_levels_one_is_adjacency():
    F = path_filtration(8)
    assert set(F.levels(1).pairs()) == {(i, j) for i in range(8) for j in range(8) if abs(i - j) <= 1}


def test_grid_comp_bound_validated_exhaustively():
    F = grid_filtration(3, 3)
    rep = F.validate()
    assert rep.passed
    assert F.max_radius == 4


def test_discrete_metric_is_bounded():
    F = bounded_filtration(5)
    assert F.levels(1) == Entourage.full(F.window)
    assert is_bounded(F, F.window.points)


@pytest.mark.parametrize(
    "table, fragment",
    [
        ([[0, 1], [2, 0]], "symmetric"),
        ([[0, 0], [0, 0]], "diagonal"),
        ([[0, 1, 5], [1, 0, 1], [5, 1, 0]], "triangle"),
        ([[0, -1], [-1, 0]], "non-negative"),
    ],
)
def test_metric_validation_witnesses(table, fragment):
    with pytest.raises(MetricError, match=fragment) as info:
        table_filtration(list(range(len(table))), table)
    assert info.value.witness


def test_non_integer_metric_rejected():
    with pytest.raises(MetricError):
        metric_filtration([0, 1], lambda a, b: 0.5 * abs(a - b))


def test_connectedness():
    assert is_connected(path_filtration(8)) == (True, 7)
    assert is_connected(diagonal_filtration(range(3)))[0] is False
    assert is_connected(path_filtration(1)) == (True, 0)


def test_boundedness():
    assert is_bounded(path_filtration(8), [4])
    assert is_bounded(path_filtration(8), range(8))
    assert not is_bounded(diagonal_filtration(range(3)), [0, 1])


def test_restrict_keeps_only_diagonal_on_spread_points():
    F = restrict(path_filtration(8), [0, 2, 4])
    assert set(F.levels(1).pairs()) == {(0, 0), (2, 2), (4, 4)}
    assert F.levels(3).is_symmetric()
    full = restrict(path_filtration(5), range(5))
    assert all(full.levels(r) == path_filtration(5).levels(r) for r in range(5))


def test_product_is_sup_metric():
    F = product(path_filtration(4), path_filtration(4))
    for r in range(4):
        expected = {
            ((a, b), (c, d))
            for a, b, c, d in itertools.product(range(4), repeat=4)
            if max(abs(a - c), abs(b - d)) <= r
        }
        assert set(F.levels(r).pairs()) == expected


def test_product_with_point_is_copy():
    F = product(path_filtration(4), path_filtration(1))
    f = {(a, 0): a for a in range(4)}
    assert check_asymorphism(f, F, path_filtration(4), 3).passed


def test_coarse_modulus_examples():
    F = path_filtration(5)
    G = path_filtration(9)
    assert coarse_modulus(lambda x: x, F, F, 4).modulus.values == (0, 1, 2, 3, 4)
    assert coarse_modulus(lambda x: 2 * x, F, G, 4).modulus.values == (0, 2, 4, 6, 8)
    assert coarse_modulus(lambda x: 0, F, G, 4).modulus.values == (0, 0, 0, 0, 0)


def test_coarse_modulus_escape_has_witness():
    F = path_filtration(3)
    res = coarse_modulus(lambda x: x, F, diagonal_filtration(range(3)), 1)
    assert not res
    assert res.witness["radius"] == 1


def test_is_large():
    F = path_filtration(10)
    assert is_large(F, range(10)) == (True, 0)
    assert is_large(F, range(0, 10, 2)) == (True, 1)
    assert is_large(diagonal_filtration(range(3)), [0]) == (False, None)


def test_asymorphism_examples():
    pts = list(range(-3, 4))
    F = metric_filtration(pts, lambda a, b: abs(a - b))
    rep = check_asymorphism(lambda x: -x, F, F, 3)
    assert rep.passed and rep.details["forward"] == [0, 1, 2, 3]
    bad = check_asymorphism(lambda x: abs(x), F, F, 3)
    assert not bad.passed and "collision" in bad.witness


def test_coarse_equivalence_bounded_vs_point():
    B = bounded_filtration(6)
    P = bounded_filtration(1)
    rep = check_coarse_equivalence_witness([0], [0], {0: 0}, B, P, 2)
    assert rep.passed


def test_coarse_equivalence_rejects_small_subset():
    F = diagonal_filtration(range(3))
    rep = check_coarse_equivalence_witness([0], [0], {0: 0}, F, F, 0)
    assert not rep.passed and rep.witness["not-large"] == "source"


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=7, unique=True))
def test_l1_filtrations_validate(points):
    from freecoarse.coarse import l1_filtration

    F = l1_filtration(points)
    assert F.validate().passed
    d = F.distance
    assert np.array_equal(d, d.T)
