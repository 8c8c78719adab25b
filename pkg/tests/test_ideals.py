import pytest
from hypothesis import given, settings, strategies as st

from freecoarse.coarse import Entourage, ball, compose, path_filtration
from freecoarse.free import FreeCoarseConfig, pullback_base, random_words, y_base
from freecoarse.groups import (
    AbelianExpP,
    AllGroups,
    ApElement,
    FlipElement,
    all_ap_elements,
    all_flip_elements,
    all_flip_vectors,
    ap_ops,
    word_ops,
)
from freecoarse.ideals import (
    GradedIdealBase,
    all_subsets_base,
    check_ideal_axioms,
    check_invariance,
    check_left_coarse,
    check_monotone,
    check_right_coarse,
    difference_set,
    entourage_from_ideal,
    extend_ideal_abelian,
    finite_sets_base,
    flip_example_base,
    flip_obstruction_check,
    ideal_ball,
    left_shift_action,
)


def sumset_closure(gens, n, p):
    """Y_n as n-fold sums of generators, by plain set iteration."""
    layer = {ApElement.zero(p)}
    for _ in range(n):
        layer = {a + g for a in layer for g in gens}
    return layer


def e(p, *pts):
    return ApElement(p, tuple((x, 1) for x in pts))


@pytest.fixture(scope="module")
def path8():
    F = path_filtration(8)
    return F, FreeCoarseConfig(F, 0, AbelianExpP(2))


@pytest.fixture(scope="module")
def path4_base():
    F = path_filtration(4)
    cfg = FreeCoarseConfig(F, 0, AbelianExpP(2))
    return F, y_base(cfg, radii=(1, 2), max_grade=3)


# --- difference sets ----------------------------------------------------------------------


def test_difference_set_path4():
    F = path_filtration(4)
    assert set(difference_set(F, 1, p=2)) == {ApElement.zero(2), e(2, 0, 1), e(2, 1, 2), e(2, 2, 3)}
    assert len(difference_set(F, 1, p=2)) <= len(F.levels(1))


def test_difference_set_of_diagonal():
    from freecoarse.coarse import diagonal_filtration
    from freecoarse.groups import ReducedWord

    F = diagonal_filtration(range(3))
    assert difference_set(F, 0, p=3) == [ApElement.zero(3)]
    assert difference_set(F, 0, kind="word") == [ReducedWord.identity()]


# --- Y-base membership against the sumset oracle ----------------------------------------


@pytest.mark.parametrize("p", [2, 3])
def test_y_base_members_match_sumsets(p):
    F = path_filtration(5)
    B = y_base(FreeCoarseConfig(F, 0, AbelianExpP(p)), radii=(1, 2), max_grade=3)
    elements = all_ap_elements(F.window, p)
    for r in (1, 2):
        gens = difference_set(F, r, p=p)
        for n in range(4):
            unshifted = sumset_closure(gens, n, p)
            shifted = {y + k * ApElement.gen(0, p) for y in unshifted for k in range(p)}
            assert set(B.members(elements, (n, r))) == shifted


def test_y_base_difference_example(path8):
    _, cfg = path8
    B = y_base(cfg, radii=(1, 2), max_grade=3)
    a, b = e(2, 0, 1), e(2, 2, 3)
    assert B.member(a, (1, 1)) and B.member(b, (1, 1))
    assert B.combine((1, 1), (1, 1)) == (2, 2)
    assert B.member(a - b, (2, 2))


def test_y_base_axioms_on_small_path(path4_base):
    F, B = path4_base
    rep = check_ideal_axioms(B, all_ap_elements(F.window, 2), exhaustive=True, coverage=False)
    assert rep.passed, rep.witness
    assert check_monotone(B, all_ap_elements(F.window, 2)).passed


def test_standard_bases_pass():
    F = path_filtration(5)
    els = all_ap_elements(F.window, 2)
    assert check_ideal_axioms(all_subsets_base(ap_ops(2)), els).passed
    assert check_ideal_axioms(finite_sets_base(F.window, 2), els, exhaustive=True).passed


def test_axiom_checker_catches_bad_combine():
    F = path_filtration(4)
    B = y_base(FreeCoarseConfig(F, 0, AbelianExpP(2)), radii=(1,), max_grade=3)
    broken = GradedIdealBase(B.kind, B.grades, B.member, B.ops, lambda g, h: g)
    rep = check_ideal_axioms(broken, all_ap_elements(F.window, 2), coverage=False)
    assert not rep.passed and "predicted" in rep.witness


def test_axiom_checker_catches_missing_identity():
    B = GradedIdealBase("empty", (0,), lambda a, g: bool(a), ap_ops(2), lambda g, h: 0)
    rep = check_ideal_axioms(B, [ApElement.zero(2), e(2, 0)])
    assert rep.witness == {"identity-missing-at": "0"}


# --- invariance -------------------------------------------------------------------------


def test_abelian_invariance_same_grade(path4_base):
    F, B = path4_base
    els = all_ap_elements(F.window, 2)
    rep = check_invariance(B, els, els[:6])
    assert rep.passed and rep.details["same_grade"]


def test_pullback_invariance_same_grade():
    F = path_filtration(4)
    P = pullback_base(FreeCoarseConfig(F, 0, AllGroups(), shadow_p=2), radii=(1,), max_grade=2)
    ws = random_words(F.window, 30, 5, seed=3)
    cs = random_words(F.window, 10, 4, seed=4)
    rep = check_invariance(P, ws, cs)
    assert rep.passed and rep.details["same_grade"]


def test_flip_invariance_refuted_with_witness():
    B = flip_example_base(4)
    rep = check_invariance(B, all_flip_vectors(4), [FlipElement.phi(4)])
    assert not rep.passed
    assert set(rep.witness) == {"grade", "element", "conjugator", "conjugate"}


# --- entourages from ideals ------------------------------------------------------------


def test_entourage_of_trivial_ideal_is_diagonal():
    els = all_ap_elements(path_filtration(3).window, 2)
    action = left_shift_action(els, ap_ops(2))
    trivial = GradedIdealBase("trivial", (0,), lambda a, g: not a, ap_ops(2), lambda g, h: 0)
    assert entourage_from_ideal(trivial, 0, action) == Entourage.diagonal(action.acted)


def test_ideal_ball_is_translate(path4_base):
    F, B = path4_base
    els = all_ap_elements(F.window, 2)
    action = left_shift_action(els, ap_ops(2))
    A = B.members(els, (1, 1))
    ent = entourage_from_ideal(B, (1, 1), action)
    for x in els[:5]:
        assert ball(x, ent) == {a + x for a in A}
        assert ideal_ball(B, (1, 1), x, action) == {a + x for a in A}
    assert ent <= entourage_from_ideal(B, (2, 1), action)


def test_action_laws(path4_base):
    F, _ = path4_base
    els = all_ap_elements(F.window, 2)
    assert left_shift_action(els, ap_ops(2)).check_laws(els[:6]).passed


def test_entourage_composition_follows_combine(path4_base):
    F, B = path4_base
    els = all_ap_elements(F.window, 2)
    action = left_shift_action(els, ap_ops(2))
    e1 = entourage_from_ideal(B, (1, 1), action)
    assert compose(e1, e1) <= entourage_from_ideal(B, B.combine((1, 1), (1, 1)), action)


# --- left and right coarseness ------------------------------------------------------------


def test_abelian_left_and_right_same_grade(path4_base):
    F, B = path4_base
    els = all_ap_elements(F.window, 2)
    action = left_shift_action(els, ap_ops(2))
    for check in (check_left_coarse, check_right_coarse):
        rep = check(B, action, xs=els[:5], gs=els[5:10])
        assert rep.passed and rep.details["same_grade"]


def test_flip_left_fails_right_passes():
    N = 3
    B = flip_example_base(N)
    els = all_flip_elements(N)
    action = left_shift_action(els, B.ops)
    phi = FlipElement.phi(N)
    xs = [FlipElement.identity(N)]
    left = check_left_coarse(B, action, xs=xs, gs=[phi])
    assert not left.passed and "escaping" in left.witness
    right = check_right_coarse(B, action, xs=xs, gs=[phi])
    assert right.passed and right.details["same_grade"]


# --- flip base ---------------------------------------------------------------------------


def test_flip_base_membership():
    B = flip_example_base(4)
    ident = FlipElement.identity(4)
    assert all(B.member(ident, m) for m in B.grades)
    e_m2 = FlipElement.basis(-2, 4)
    assert [m for m in B.grades if B.member(e_m2, m)] == [m for m in B.grades if m <= -2]


def test_flip_base_difference_closure():
    B = flip_example_base(3)
    assert check_ideal_axioms(B, all_flip_vectors(3), exhaustive=True, coverage=False).passed


def test_flip_obstruction_splits_everything():
    rep = flip_obstruction_check(4)
    assert rep.passed
    assert rep.details["split_count"] == 512
    assert rep.details["example"] == {"vector": "(e-1+e2, id)", "H0": "(e2, id)", "phi H0 phi": "(e-1, id)"}


# --- extension from a subgroup ---------------------------------------------------------------


def test_extension_over_z2_squared():
    # G = Z_2^2 as A(two points), H the first factor, B_g = {0} or H
    G = all_ap_elements(path_filtration(2).window, 2)
    in_H = lambda a: all(x == 0 for x in a.support)
    inner = GradedIdealBase("singleton", (0, 1), lambda a, g: g == 1 or not a, ap_ops(2), max)
    ext = extend_ideal_abelian(inner, G, in_H)
    assert set(ext.members(G, (0, 0))) == {ApElement.zero(2)}
    assert set(ext.members(G, (0, 1))) == {ApElement.zero(2), e(2, 0)}
    assert set(ext.members(G, (1, 1))) == {g for g in G if in_H(g) or in_H(g - G[1])} | set(ext.members(G, (0, 1)))
    assert set(ext.members(G, (3, 1))) == set(G)
    assert check_ideal_axioms(ext, G, exhaustive=True).passed


def test_extension_restricts_to_inner_at_m0():
    F = path_filtration(3)
    inner = y_base(FreeCoarseConfig(F, 0, AbelianExpP(2)), radii=(1,), max_grade=2)
    G = all_ap_elements(path_filtration(4).window, 2)
    in_H = lambda a: all(x < 3 for x in a.support)
    ext = extend_ideal_abelian(inner, G, in_H, max_m=2)
    for g in inner.grades:
        assert set(ext.members(G, (0, g))) == {a for a in G if in_H(a) and inner.member(a, g)}


def test_extension_rejects_nonabelian():
    B = all_subsets_base(word_ops())
    from freecoarse.groups import ReducedWord

    with pytest.raises(ValueError):
        extend_ideal_abelian(B, [ReducedWord.gen(0), ReducedWord.gen(1)], lambda w: True)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(all_ap_elements(path_filtration(4).window, 2)), st.integers(0, 3), st.integers(1, 2))
def test_y_base_monotone_in_grade(a, n, r):
    F = path_filtration(4)
    B = y_base(FreeCoarseConfig(F, 0, AbelianExpP(2)), radii=(1, 2), max_grade=4)
    if B.member(a, (n, r)):
        assert B.member(a, (n + 1, r))
        assert B.member(a, (n, 2))
