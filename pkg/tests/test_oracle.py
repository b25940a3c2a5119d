from fractions import Fraction

import numpy as np
import pytest

from iwahori_h1.charfield import FieldParams, SmoothCharacter, generic_character
from iwahori_h1.cohomology import build_m_beta_r
from iwahori_h1.heckemod import HModule
from iwahori_h1.oracle import (Ctx, Oracle, compare_cross, compare_tables,
                               oracle_graded_action, t_samples, verify_conj_suite,
                               verify_factorization, verify_graded, verify_unip)
from iwahori_h1.weyl import AffineRoot, Root, affine_simple_roots

FP3, FP5 = FieldParams(3), FieldParams(5)


def test_ctx_reduction_and_teichmuller():
    c = Ctx(5)
    for x in range(1, 5):
        t = c.teich(x)
        assert t % 5 == x and pow(t, 4, c.pN) == 1
    assert c.residue(Fraction(7, 2)) == (7 * pow(2, -1, 5)) % 5


def test_trunc_matrix_inverse():
    o = Oracle(FP5, 3)
    h = o.ua(AffineRoot(Root(1, 2), 0), 3) * o.ua(AffineRoot(Root(3, 1), 1), 2) * t_samples(o)[0]
    assert h.in_I1()
    assert (h * h.inverse()).eq(o.I())
    assert not o.s_hat(affine_simple_roots(3)[0]).in_I1()


@pytest.mark.parametrize("n", [2, 3])
def test_coset_transfer_examples(n):
    o = Oracle(FP5, n)
    p = o.p
    for al in affine_simple_roots(n):
        a, l = al.root, al.level
        minus = AffineRoot(Root(a.k, a.j), -l)
        for x in range(p):
            x2, xi = o.coset_transfer(al, x, o.I())
            assert x2 == x and xi.eq(o.I())
            for y in (1, 2, p + 3):
                x2, xi = o.coset_transfer(al, x, o.ua(al, y))
                assert x2 == (x + y) % p
                assert xi.eq(o.ua(minus, o.teich(x + y) - o.teich(x) - y))
            for t in t_samples(o):
                x2, xi = o.coset_transfer(al, x, t)
                sh = o.s_hat(al)
                want = sh * t * sh.inverse() * o.ua(minus, (1 - 1 / o.root_value(a, t)) * o.teich(x))
                assert x2 == x and xi.eq(want)


def test_coset_transfer_rejects_outside_I1():
    o = Oracle(FP3, 2)
    with pytest.raises(ValueError):
        o.coset_transfer(affine_simple_roots(2)[0], 0, o.s_hat(affine_simple_roots(2)[0]))


def test_oracle_requires_Qp():
    with pytest.raises(ValueError):
        Oracle(FieldParams(3, 2), 2)


@pytest.mark.parametrize("n,fp", [(2, FP3), (2, FP5), (3, FP3)])
def test_conj_suite(n, fp):
    rep = verify_conj_suite(fp, n)
    assert rep.ok, rep.failures[:5]
    assert verify_unip(fp, n).ok


def test_precision_doubling_keeps_verdicts():
    lo, hi = verify_conj_suite(FP3, 2, K=8), verify_conj_suite(FP3, 2, K=16, V=8)
    assert lo.ok and hi.ok and lo.checks == hi.checks
    assert verify_graded(FP3, 2, K=16, V=8).ok == verify_graded(FP3, 2).ok is True


@pytest.mark.parametrize("n,fp", [(2, FP5), (3, FP3), (3, FP5)])
def test_factorization_round_trip(n, fp):
    rep = verify_factorization(fp, n, samples=100)
    assert rep.ok and rep.checks == 200


def test_graded_action_matches_formulas_n2():
    assert verify_graded(FP5, 2).ok


def test_cross_term_reproduced():
    # chi o alpha^vee(x) = x_bar on units switches on the -delta_{F,Q_p} cross term
    chi = SmoothCharacter(FP5, (1, 0), (1, 1))
    tb = oracle_graded_action(FP5, chi, Root(1, 2))
    assert tb.ok
    assert any(np.any(X) for X in tb.cross.values())
    assert compare_cross(FP5, chi, Root(1, 2), tb) == []


def test_oracle_catches_a_wrong_coefficient():
    chi = generic_character(FP5, 3)
    beta = Root(1, 2)
    m = build_m_beta_r(FP5, chi, beta, 0)
    tb = oracle_graded_action(FP5, chi, beta, keys=["s1", "s2"], with_cross=False)
    assert compare_tables(tb, m) == []
    mats = {k: v.copy() for k, v in m.mats.items()}
    i, j = np.argwhere(mats["s2"] != 0)[0]
    mats["s2"][i, j] = FP5.C.neg(int(mats["s2"][i, j]))
    bad = HModule(m.fp, m.levi, m.labels, mats)
    assert compare_tables(tb, bad)
