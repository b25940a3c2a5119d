import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from iwahori_h1 import linalg as la
from iwahori_h1.charfield import FieldParams, SmoothCharacter, generic_character
from iwahori_h1.chevalley import coroot_elt
from iwahori_h1.cohomology import build_gr0, build_ind_chi, build_m_beta_r
from iwahori_h1.heckemod import (HModule, Levi, check_relations, direct_sum, find_isomorphism,
                                 find_splitting, is_supersingular, left_adjoint_dim,
                                 right_adjoint, sign_module, trivial_module)
from iwahori_h1.weyl import Root

FP = FieldParams(5)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_trivial_and_sign_modules_pass(n):
    for M in (trivial_module(FP, Levi.full(n)), sign_module(FP, Levi.full(n))):
        rep = check_relations(M)
        assert rep.ok and len(rep) > 0


def test_perturbations_fail():
    M = build_ind_chi(FP, generic_character(FP, 3))
    assert check_relations(M).ok
    for key in ("s1", "a0", "o0"):
        for pos in [(0, 0), (1, 3), (5, 2)]:
            mats = {k: v.copy() for k, v in M.mats.items()}
            mats[key][pos] = FP.C.add(int(mats[key][pos]), 1)
            bad = HModule(M.fp, M.levi, M.labels, mats)
            assert not check_relations(bad).ok, (key, pos)


def test_star_on_characters():
    lv = Levi.full(3)
    for key in lv.affine_roots():
        assert trivial_module(FP, lv).star(key).tolist() == [[1]]
        assert sign_module(FP, lv).star(key).tolist() == [[0]]


@pytest.mark.parametrize("chi", [SmoothCharacter.trivial(FP, 3), generic_character(FP, 3)],
                         ids=["trivial", "generic"])
def test_star_quadratic(chi):
    M = build_ind_chi(FP, chi)
    F = M.F
    for key, ar in M.levi.affine_roots().items():
        S = M.star(key)
        c = M.c_matrix(ar.root)
        assert np.array_equal(la.matmul(F, S, S), la.scale(F, F.neg(1), la.matmul(F, c, S)))


def test_c_matrix_matches_delta_shortcut():
    F = FP.C
    for chi in (SmoothCharacter.trivial(FP, 3), generic_character(FP, 3),
                SmoothCharacter(FP, (1, 1, 3), (1, 2, 3))):
        M = build_gr0(FP, chi)
        assert M.is_diagonal_torus()
        for ar in M.levi.affine_roots().values():
            c = M.c_matrix(ar.root)
            assert not np.any(c * (1 - np.eye(M.dim, dtype=np.int64)))
            for v in range(M.dim):
                # c acts by -1 exactly when the basis character is trivial on the coroot
                triv = all(M.torus(coroot_elt(3, ar.root, k / (FP.q - 1)))[v, v] == 1
                           for k in range(FP.q - 1))
                assert c[v, v] == (F.neg(1) if triv else 0)


def test_right_adjoint_full_levi_is_identity():
    M = build_ind_chi(FP, generic_character(FP, 3))
    R = right_adjoint(M, M.levi.simples)
    assert R.dim == M.dim
    for k in M.levi.gen_keys():
        assert np.array_equal(R.module.mats[k], la.restrict(M.F, R.basis, M.mats[k]))


def test_adjoint_dims_of_induced():
    for chi in (SmoothCharacter.trivial(FP, 3), generic_character(FP, 3)):
        M = build_ind_chi(FP, chi)
        assert left_adjoint_dim(M, []) == 1
        assert left_adjoint_dim(M, M.levi.simples) == M.dim
        assert not is_supersingular(M)
        assert not is_supersingular(M, all_levis=True)


def test_supersingularity_examples():
    assert not is_supersingular(trivial_module(FP, Levi.full(3)))
    for r in range(FP.f):
        m = build_m_beta_r(FP, generic_character(FP, 3), Root(1, 3), r)
        assert is_supersingular(m) and is_supersingular(m, all_levis=True)
        assert all(left_adjoint_dim(m, J) == 0 for J in ([], [1], [2]))


def test_right_adjoint_vanishes_off_levi():
    chi = generic_character(FP, 4)
    m = build_m_beta_r(FP, chi, Root(1, 3), 0)
    # beta = a_{1,3} lies in M_(3) but not in M_(1) or M_(2)
    assert right_adjoint(m, {1, 2}).dim > 0
    assert right_adjoint(m, {2, 3}).dim == 0
    assert right_adjoint(m, {1, 3}).dim == 0


def test_split_direct_sum():
    A = build_ind_chi(FP, generic_character(FP, 2))
    B = build_ind_chi(FP, generic_character(FP, 2, seed=3))
    S = direct_sum([A, B])
    res = find_splitting(S, A.dim)
    assert res.split
    assert np.array_equal(res.section, np.concatenate(
        [la.zeros(B.dim, A.dim), np.eye(B.dim, dtype=np.int64)], axis=1))


def test_find_isomorphism_on_twisted_copy():
    M = build_ind_chi(FP, generic_character(FP, 3))
    P = np.roll(np.eye(M.dim, dtype=np.int64), 1, axis=0) * 2
    Pi = la.inverse(M.F, P)
    mats = {k: la.matmul(M.F, la.matmul(M.F, Pi, v), P) for k, v in M.mats.items()}
    N = HModule(M.fp, M.levi, M.labels, mats)
    X = find_isomorphism(M, N)
    assert X is not None
    assert find_isomorphism(M, build_ind_chi(FP, generic_character(FP, 3, seed=2))) is None


def test_to_json_shape():
    M = build_ind_chi(FP, generic_character(FP, 2))
    js = M.to_json()
    assert js["dim"] == 2 and set(js["generators"]) == set(M.levi.gen_keys())


@settings(max_examples=15)
@given(st.integers(2, 3).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 3), min_size=n, max_size=n),
    st.lists(st.integers(0, 23), min_size=n, max_size=n))))
def test_relations_hold_on_random_characters(data):
    ex, us = data
    chi = SmoothCharacter(FP, tuple(ex), tuple(FP.C.exp(u) for u in us))
    assert check_relations(build_ind_chi(FP, chi)).ok
