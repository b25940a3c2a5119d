import numpy as np
from hypothesis import given, strategies as st

from iwahori_h1 import linalg as la
from iwahori_h1.charfield import CField

F9 = CField(3, 2)


def mats(F, d1, d2):
    return st.lists(st.integers(0, F.order - 1), min_size=d1 * d2, max_size=d1 * d2).map(
        lambda xs: np.array(xs, dtype=np.int64).reshape(d1, d2))


def slow_mul(F, a, b):
    out = la.zeros(a.shape[0], b.shape[1])
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            acc = 0
            for k in range(a.shape[1]):
                acc = F.add(acc, F.mul(int(a[i, k]), int(b[k, j])))
            out[i, j] = acc
    return out


def test_eventual_image_examples():
    I = la.identity(F9, 3)
    assert la.eventual_image(F9, I).shape[0] == 3
    nil = np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert la.eventual_image(F9, nil).shape[0] == 0
    img = la.eventual_image(F9, np.diag([1, 0]))
    assert img.tolist() == [[1, 0]]


@given(st.integers(1, 5).flatmap(lambda k: st.tuples(mats(F9, 4, k), mats(F9, k, 3))))
def test_matmul_matches_definition(ab):
    a, b = ab
    assert np.array_equal(la.matmul(F9, a, b), slow_mul(F9, a, b))


@given(mats(F9, 4, 4))
def test_eventual_image_invariant_and_invertible(a):
    V = la.eventual_image(F9, a)
    if V.shape[0]:
        R = la.restrict(F9, V, a)
        la.inverse(F9, R)


@given(mats(F9, 3, 5))
def test_nullspace_and_solve(a):
    N = la.nullspace(F9, a)
    assert not np.any(la.matmul(F9, a, N.T.copy()))
    assert N.shape[0] + la.rank(F9, a) == 5
    x = np.array([[1, 2, 0]])
    b = la.matmul(F9, x, a)
    y = la.solve_left(F9, a, b)
    assert y is not None and np.array_equal(la.matmul(F9, y, a), b)


@given(mats(F9, 4, 4))
def test_inverse(a):
    if la.rank(F9, a) == 4:
        assert np.array_equal(la.matmul(F9, a, la.inverse(F9, a)), la.identity(F9, 4))


def test_sparse_solve_witness():
    F = CField(5, 1)
    # x0 + x1 = 1, x0 + x1 = 2 is inconsistent
    x, y = la.sparse_solve(F, [{0: 1, 1: 1}, {0: 1, 1: 1}], [1, 2], 2, track=True)
    assert x is None and y
    assert F.add(F.mul(y.get(0, 0), 1), F.mul(y.get(1, 0), 2)) != 0
    assert F.add(y.get(0, 0), y.get(1, 0)) == 0
