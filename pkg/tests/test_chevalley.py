from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from iwahori_h1.chevalley import (HALF, MonomialMatrix, check_d_well_defined, conj_lift_identity_check,
                                  coroot_elt, d_const, d_w, d_w_word, frak_s, lift, lift_word,
                                  reduced_words, s_hat, torus_discrepancy, unip_identity_check,
                                  word_independence_check)
from iwahori_h1.weyl import (WeylElt, affine_simple_roots, all_elements, all_roots,
                             simple_root)


def test_lift_identity_and_s1():
    assert lift(WeylElt.identity(3)) == MonomialMatrix.identity(3)
    m = lift(WeylElt.simple(2, 1)).to_sign_matrix()
    # [[0, 1], [-1, 0]] with no varpi powers
    assert m == [[0, (1, 0)], [(-1, 0), 0]]


def test_lift_multiplicative_on_reduced_words():
    s1, s2 = WeylElt.simple(3, 1), WeylElt.simple(3, 2)
    assert lift(s1 * s2) == lift(s1) * lift(s2)
    assert lift_word(3, (1, 2, 1)) == lift_word(3, (2, 1, 2))


def test_d_const_examples():
    for a in all_roots(4):
        assert d_const(a, a, 4) == -1
        for b in all_roots(4):
            assert d_const(a, b, 4) == d_const(a, -b, 4)
            assert d_const(a, b, 4) in (1, -1)
    assert d_const(simple_root(1), simple_root(2), 3) == d_w_word(3, (1,), simple_root(2))


def test_d_w_examples():
    for b in all_roots(3):
        assert d_w(WeylElt.identity(3), b) == 1
    for w in all_elements(4):
        for b in all_roots(4):
            assert d_w(w, b) == d_w(w, -b)


def test_torus_discrepancy_examples():
    s1 = WeylElt.simple(3, 1)
    assert torus_discrepancy(WeylElt.identity(3), s1) == MonomialMatrix.identity(3)
    assert torus_discrepancy(s1, s1) == coroot_elt(3, simple_root(1), HALF)
    assert torus_discrepancy(s1, WeylElt.simple(3, 2)) == MonomialMatrix.identity(3)


def test_frak_s_squares_to_coroot_minus_one():
    for a in all_roots(4):
        assert frak_s(4, a) * frak_s(4, a) == coroot_elt(4, a, HALF)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_conj_lift_exhaustive(n):
    assert all(conj_lift_identity_check(w, b) for w in all_elements(n) for b in all_roots(n))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_d_word_independence(n):
    assert check_d_well_defined(n)
    assert word_independence_check(n)


def test_reduced_words_s1s2s1():
    assert set(reduced_words(WeylElt.from_word(3, (1, 2, 1)))) == {(1, 2, 1), (2, 1, 2)}


@pytest.mark.parametrize("n", [2, 3])
def test_unip_identity(n):
    for ar in affine_simple_roots(n):
        assert unip_identity_check(n, ar)


def test_affine_reflection_is_involution_mod_torus():
    for n in (2, 3, 4):
        for ar in affine_simple_roots(n):
            sq = s_hat(n, ar) * s_hat(n, ar)
            assert sq.is_diagonal and not any(sq.vals)


@given(st.integers(2, 5).flatmap(lambda n: st.tuples(
    st.permutations(list(range(1, n + 1))),
    st.lists(st.fractions(), min_size=n, max_size=n),
    st.lists(st.integers(-3, 3), min_size=n, max_size=n))))
def test_monomial_group_law(data):
    perm, ph, vs = data
    n = len(perm)
    g = MonomialMatrix(tuple(perm), tuple(Fraction(x) % 1 for x in ph), tuple(vs))
    assert g * g.inverse() == MonomialMatrix.identity(n) == g.inverse() * g
    h = lift(WeylElt(tuple(perm)))
    assert (g * h) * g == g * (h * g)
