import itertools

import pytest
from hypothesis import given, settings, strategies as st

from freecoarse.coarse import Window, path_filtration
from freecoarse.groups import (
    AbelianExpP,
    AllGroups,
    ApElement,
    FlipElement,
    ModulusMismatch,
    ParseError,
    ReducedWord,
    abelianize,
    all_ap_elements,
    all_flip_elements,
    ap_add,
    ap_ops,
    augmentation,
    extend_to_hom,
    flip_multiply,
    flip_ops,
    parse_ap_element,
    parse_word,
    word_ops,
)

W = path_filtration(6).window


def elem(p, **coeffs):
    return ApElement.from_dict({int(k[1:]): v for k, v in coeffs.items()}, p)


def ap_elements(p=2, n=6):
    return st.dictionaries(st.integers(0, n - 1), st.integers(0, p - 1), max_size=n).map(
        lambda d: ApElement.from_dict(d, p)
    )


letters = st.tuples(st.integers(0, 3), st.sampled_from((1, -1)))
words = st.lists(letters, max_size=8).map(lambda ls: ReducedWord(tuple(ls)))


def reduce_oracle(letters_):
    """Cancel the leftmost adjacent inverse pair until none is left."""
    out = list(letters_)
    changed = True
    while changed:
        changed = False
        for i in range(len(out) - 1):
            if out[i][0] == out[i + 1][0] and out[i][1] == -out[i + 1][1]:
                del out[i : i + 2]
                changed = True
                break
    return tuple(out)


# --- A_p(X) --------------------------------------------------------------------------------


def test_ap_examples():
    a = elem(2, x0=1, x1=1)
    assert ap_add(a, ApElement.zero(2)) == a
    assert ap_add(a, elem(2, x1=1, x2=1)) == elem(2, x0=1, x2=1)
    assert elem(3, x0=2) + elem(3, x0=2) == elem(3, x0=1)


def test_no_zero_coefficients_stored():
    a = ApElement(3, ((1, 3), (0, 2), (1, 0)))
    assert a.terms == ((0, 2),)


def test_augmentation_examples():
    assert augmentation(elem(3, x1=1) - elem(3, x4=1)) == 0
    assert augmentation(elem(2, x0=1, x1=1, x2=1)) == 1


def test_mixed_moduli_rejected():
    with pytest.raises(ModulusMismatch):
        elem(2, x0=1) + elem(3, x0=1)


def test_non_prime_rejected():
    with pytest.raises(ValueError):
        AbelianExpP(4)


@settings(max_examples=80, deadline=None)
@given(ap_elements(3), ap_elements(3), ap_elements(3))
def test_ap_group_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert a - a == ApElement.zero(3)
    assert 3 * a == ApElement.zero(3)
    assert augmentation(a + b) == (augmentation(a) + augmentation(b)) % 3


@settings(max_examples=80, deadline=None)
@given(ap_elements(3))
def test_encode_roundtrip(a):
    assert ApElement.decode(a.encode(W), W, 3) == a


def test_all_ap_elements_is_the_group():
    els = all_ap_elements(Window(range(3)), 3)
    assert len(els) == 27 and len(set(els)) == 27


# --- reduced words ----------------------------------------------------------------------


def test_word_examples():
    x, y, z = (ReducedWord.gen(i) for i in (0, 1, 2))
    u = x * y
    assert u * u.inverse() == ReducedWord.identity()
    assert (x * y) * (y.inverse() * z) == x * z


@settings(max_examples=150, deadline=None)
@given(st.lists(letters, max_size=10))
def test_reduction_confluent(ls):
    assert ReducedWord(tuple(ls)).letters == reduce_oracle(ls)


@settings(max_examples=80, deadline=None)
@given(words, words, words)
def test_word_group_laws(u, v, w):
    assert (u * v) * w == u * (v * w)
    assert u * u.inverse() == ReducedWord.identity()
    assert u.inverse().inverse() == u


def test_abelianize_examples():
    x, y = ReducedWord.gen(0), ReducedWord.gen(1)
    assert abelianize(ReducedWord.identity(), 2) == ApElement.zero(2)
    assert abelianize(x * y * x.inverse() * y.inverse(), 2) == ApElement.zero(2)
    assert abelianize(x * y * x, 2) == elem(2, x1=1)


@settings(max_examples=80, deadline=None)
@given(words, words)
def test_abelianize_is_homomorphism(u, v):
    assert abelianize(u * v, 3) == abelianize(u, 3) + abelianize(v, 3)


# --- homomorphism extension ---------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(words)
def test_extension_of_identity_into_abelian_is_abelianize(w):
    f = {x: ApElement.gen(x, 2) for x in range(4)}
    hom = extend_to_hom(f, AllGroups(), ap_ops(2))
    assert hom(w) == abelianize(w, 2)


@settings(max_examples=60, deadline=None)
@given(ap_elements(2, 4))
def test_extension_identity_and_trivial(a):
    ident = extend_to_hom({x: ApElement.gen(x, 2) for x in range(4)}, AbelianExpP(2), ap_ops(2))
    trivial = extend_to_hom({x: ApElement.zero(2) for x in range(4)}, AbelianExpP(2), ap_ops(2))
    assert ident(a) == a
    assert trivial(a) == ApElement.zero(2)


@settings(max_examples=60, deadline=None)
@given(words)
def test_extension_into_words_is_identity(w):
    hom = extend_to_hom({x: ReducedWord.gen(x) for x in range(4)}, AllGroups(), word_ops())
    assert hom(w) == w


def test_extension_rejects_wrong_exponent():
    with pytest.raises(ValueError):
        extend_to_hom({0: ReducedWord.gen(0)}, AbelianExpP(2), word_ops())


# --- flip group ---------------------------------------------------------------------------


def test_flip_examples():
    N = 4
    v = FlipElement(frozenset({0, 1}), False, N)
    w = FlipElement(frozenset({1, 3}), False, N)
    assert flip_multiply(v, w) == FlipElement(frozenset({0, 3}), False, N)
    phi = FlipElement.phi(N)
    assert phi * phi == FlipElement.identity(N)
    assert phi * FlipElement.basis(3, N) * phi == FlipElement.basis(-3, N)


def test_flip_index_bounds():
    with pytest.raises(ValueError):
        FlipElement(frozenset({5}), False, 4)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_flip_group_laws(data):
    els = all_flip_elements(2)
    a, b, c = (data.draw(st.sampled_from(els)) for _ in range(3))
    ops = flip_ops(2)
    assert (a * b) * c == a * (b * c)
    assert a * a.inverse() == ops.identity
    assert a.inverse() * a == ops.identity


def test_flip_group_is_closed():
    els = set(all_flip_elements(2))
    assert len(els) == 2 ** 6
    assert all(a * b in els for a, b in itertools.product(els, repeat=2))


# --- parsing ------------------------------------------------------------------------------


def test_parse_roundtrip():
    assert parse_ap_element("x0+x2", W, 2) == elem(2, x0=1, x2=1)
    assert parse_ap_element("2x0-x3", W, 3) == elem(3, x0=2, x3=2)
    assert parse_ap_element("0", W, 2) == ApElement.zero(2)
    assert parse_word("x0 x1^-1", W) == ReducedWord(((0, 1), (1, -1)))
    assert parse_word("e", W) == ReducedWord.identity()


@pytest.mark.parametrize("text", ["x0+q", "x0x1", "x9", "+"])
def test_parse_errors_carry_position(text):
    with pytest.raises(ParseError) as info:
        parse_ap_element(text, W, 2)
    assert info.value.position >= 0
