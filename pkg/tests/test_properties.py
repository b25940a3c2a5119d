"""Property tests for the structural invariants of the graded pieces."""
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from iwahori_h1 import linalg as la
from iwahori_h1.charfield import FieldParams, SmoothCharacter
from iwahori_h1.cli import main
from iwahori_h1.cohomology import (build_gr0, build_m_beta_r, build_n_F_beta_r,
                                   expected_total_dim, m_index)
from iwahori_h1.heckemod import check_relations, lambda_i
from iwahori_h1.weyl import (Root, W_beta_prime, longest_element, parabolic_elements,
                             positive_roots)

FIELDS = [FieldParams(3), FieldParams(5), FieldParams(3, 2)]


def characters(n):
    return st.sampled_from(FIELDS).flatmap(lambda fp: st.builds(
        lambda ex, us: SmoothCharacter(fp, tuple(ex), tuple(fp.C.exp(u) for u in us)),
        st.lists(st.integers(0, fp.q - 2), min_size=n, max_size=n),
        st.lists(st.integers(0, fp.C.order - 2), min_size=n, max_size=n)))


def beta_and_chi(nmax):
    return st.integers(2, nmax).flatmap(lambda n: st.tuples(
        characters(n), st.sampled_from(positive_roots(n)), st.integers(0, 1)))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_dimension_identity(n):
    for fp in (FieldParams(3), FieldParams(5, 2), FieldParams(3, 1, 2)):
        by_height = {}
        for b in positive_roots(n):
            by_height.setdefault(b.height, []).append(len(W_beta_prime(n, b)) * fp.f)
        for a, ds in by_height.items():
            assert sum(ds) == fp.f * len(ds) * factorial(n) // a
        total = factorial(n) * fp.d(n) + sum(map(sum, by_height.values()))
        assert total == expected_total_dim(n, fp)


@settings(max_examples=25)
@given(beta_and_chi(3))
def test_relations_on_random_characters(data):
    chi, beta, r = data
    fp = chi.fp
    r = min(r, fp.f - 1)
    assert check_relations(build_m_beta_r(fp, chi, beta, r)).ok
    if beta.height == 1:
        assert check_relations(build_n_F_beta_r(fp, chi, beta, r)).ok


@settings(max_examples=10)
@given(characters(2))
def test_gr0_relations(chi):
    assert check_relations(build_gr0(chi.fp, chi)).ok


def _in_levi_i(beta, i):
    return beta.k <= i or beta.j > i


@settings(max_examples=20)
@given(beta_and_chi(4))
def test_T_lambda_diagonal_on_levi_part(data):
    chi, beta, r = data
    fp = chi.fp
    m = build_m_beta_r(fp, chi, beta, min(r, fp.f - 1))
    n = m.n
    idx = m_index(m)
    for i in range(1, n):
        A = m.T(lambda_i(n, i, inverse=True))
        Wi = set(parabolic_elements(n, set(range(1, n)) - {i}))
        for w, k in idx.items():
            if w not in Wi:
                continue
            row = A[k]
            others = np.delete(row, k)
            assert not np.any(others)
            assert (row[k] != 0) == _in_levi_i(beta, i)


def tall_beta_and_chi(nmax):
    return st.integers(3, nmax).flatmap(lambda n: st.tuples(
        characters(n), st.sampled_from([b for b in positive_roots(n) if b.height >= 2]),
        st.integers(0, 1)))


@settings(max_examples=20)
@given(tall_beta_and_chi(4))
def test_T_lambda_power_lands_in_levi_part(data):
    chi, beta, r = data
    fp = chi.fp
    m = build_m_beta_r(fp, chi, beta, min(r, fp.f - 1))
    n, F = m.n, m.F
    idx = m_index(m)
    for i in range(1, n):
        A = la.matpow(F, m.T(lambda_i(n, i, inverse=True)), m.dim)
        Wi = set(parabolic_elements(n, set(range(1, n)) - {i}))
        outside = [k for w, k in idx.items() if w not in Wi]
        assert not np.any(A[:, outside])


@settings(max_examples=15)
@given(st.integers(3, 4).flatmap(lambda n: st.tuples(characters(n), st.integers(0, 1))))
def test_longest_element_line_in_top_piece(data):
    chi, r = data
    fp, n = chi.fp, chi.n
    m = build_m_beta_r(fp, chi, Root(1, n), min(r, fp.f - 1))
    k = m_index(m)[longest_element(n)]
    for key in m.levi.affine_roots():
        row = m.mats[key][k]
        assert not np.any(np.delete(row, k))
    assert m.mats["a0"][k, k] == 0


@settings(max_examples=5)
@given(st.sampled_from(["trivial", "generic", "generic:2"]))
def test_cli_deterministic(chi):
    import io
    from contextlib import redirect_stdout
    outs = []
    for _ in range(2):
        buf = io.StringIO()
        with redirect_stdout(buf):
            assert main(["decompose", "--n", "3", "--p", "3", "--chi", chi]) == 0
        outs.append(buf.getvalue())
    assert outs[0] == outs[1]
