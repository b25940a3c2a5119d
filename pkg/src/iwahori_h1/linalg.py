"""
Dense linear algebra over C = F_{p^m} on arrays of integer element codes.

Elimination uses the field's addition and multiplication tables directly.
Products go through the F_p expansion, where each entry c becomes the m x m
matrix of x -> x c; this is a ring map, so float64 BLAS then mod p is exact
as long as (inner dim) * m * (p-1)^2 stays below 2^53.

Vectors are rows and matrices act on the right, matching right modules.
"""

from __future__ import annotations

import numpy as np

from .charfield import CField


def zeros(d1: int, d2: int) -> np.ndarray:
    return np.zeros((d1, d2), dtype=np.int64)


def identity(F: CField, d: int) -> np.ndarray:
    return np.eye(d, dtype=np.int64)


def expand(F: CField, a: np.ndarray) -> np.ndarray:
    d1, d2 = a.shape
    m = F.m
    return F.mult_mats[a].transpose(0, 2, 1, 3).reshape(d1 * m, d2 * m)


def compress(F: CField, big: np.ndarray) -> np.ndarray:
    m = F.m
    d1, d2 = big.shape[0] // m, big.shape[1] // m
    dig = big.reshape(d1, m, d2, m)[:, 0, :, :]
    return (dig * (F.p ** np.arange(m))).sum(axis=2).astype(np.int64)


def matmul(F: CField, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
    if a.shape[0] == 0 or b.shape[1] == 0 or a.shape[1] == 0:
        return zeros(a.shape[0], b.shape[1])
    # monomial factors (torus, omega, most generators) reduce to table lookups
    if np.all(np.count_nonzero(a, axis=1) <= 1):
        j = np.argmax(a != 0, axis=1)
        return F.mul_t[a[np.arange(a.shape[0]), j][:, None], b[j]]
    if np.all(np.count_nonzero(b, axis=0) <= 1):
        i = np.argmax(b != 0, axis=0)
        return F.mul_t[a[:, i], b[i, np.arange(b.shape[1])][None, :]]
    if F.m == 1:
        return (a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64) % F.p
    ea, eb = expand(F, a).astype(np.float64), expand(F, b).astype(np.float64)
    # only the first row of each m-block of ea is needed
    m = F.m
    rows = ea.reshape(a.shape[0], m, -1)[:, 0, :]
    prod = (rows @ eb).astype(np.int64) % F.p
    dig = prod.reshape(a.shape[0], b.shape[1], m)
    return (dig * (F.p ** np.arange(m))).sum(axis=2).astype(np.int64)


def mat_chain(F: CField, mats, d: int) -> np.ndarray:
    out = identity(F, d)
    for x in mats:
        out = matmul(F, out, x)
    return out


def matpow(F: CField, a: np.ndarray, e: int) -> np.ndarray:
    out = identity(F, a.shape[0])
    base = a
    while e:
        if e & 1:
            out = matmul(F, out, base)
        base = matmul(F, base, base)
        e >>= 1
    return out


def add(F: CField, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return F.add_t[a, b]


def sub(F: CField, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return F.add_t[a, F.neg_t[b]]


def scale(F: CField, c: int, a: np.ndarray) -> np.ndarray:
    return F.mul_t[c, a]


def rref(F: CField, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form (nonzero rows only) and pivot columns."""
    mt, at, nt, it = F.mul_t, F.add_t, F.neg_t, F.inv_t
    m = np.array(a, dtype=np.int64)
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            m[[r, k]] = m[[k, r]]
        m[r] = mt[it[m[r, c]], m[r]]
        col = m[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            m[nzr] = at[m[nzr], nt[mt[col[nzr][:, None], m[r][None, :]]]]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(F: CField, a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    return len(rref(F, a)[1])


def row_space(F: CField, a: np.ndarray) -> np.ndarray:
    if a.shape[0] == 0:
        return zeros(0, a.shape[1])
    return rref(F, a)[0]


def nullspace(F: CField, a: np.ndarray) -> np.ndarray:
    """Basis (rows) of {x : a x^T = 0}."""
    rows, cols = a.shape
    if rows == 0:
        return identity(F, cols)
    r, piv = rref(F, a)
    ps = set(piv)
    free = [c for c in range(cols) if c not in ps]
    out = zeros(len(free), cols)
    for i, f in enumerate(free):
        out[i, f] = 1
        for k, c in enumerate(piv):
            out[i, c] = F.neg_t[r[k, f]]
    return out


def left_kernel(F: CField, a: np.ndarray) -> np.ndarray:
    """Basis (rows) of {x : x a = 0}."""
    return nullspace(F, a.T.copy())


def solve_left(F: CField, a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """Some x with x a = b (b one row or several), or None if inconsistent."""
    bb = np.atleast_2d(b)
    na = a.shape[0]
    if na == 0:
        return zeros(bb.shape[0], 0) if not np.any(bb) else None
    aug = np.concatenate([a.T, bb.T], axis=1)
    r, piv = rref(F, aug)
    if any(c >= na for c in piv):
        return None
    x = zeros(bb.shape[0], na)
    for k, c in enumerate(piv):
        x[:, c] = r[k, na:]
    return x if np.ndim(b) == 2 else x[0]


def in_span(F: CField, basis: np.ndarray, vecs: np.ndarray) -> bool:
    v = np.atleast_2d(vecs)
    if not np.any(v):
        return True
    if basis.shape[0] == 0:
        return False
    return rank(F, np.vstack([basis, v])) == rank(F, basis)


def eventual_image(F: CField, a: np.ndarray) -> np.ndarray:
    """Row space of A^{dim} (vectors v A^dim), asserted stable under one more A."""
    d = a.shape[0]
    if d == 0:
        return zeros(0, 0)
    ad = matpow(F, a, d)
    img = row_space(F, ad)
    if rank(F, matmul(F, ad, a)) != img.shape[0]:
        raise AssertionError("image did not stabilize at dim")
    return img


def restrict(F: CField, basis: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Matrix of v -> v a on the row space of basis (which must be invariant)."""
    img = matmul(F, basis, a)
    x = solve_left(F, basis, img)
    if x is None:
        raise AssertionError("subspace is not invariant")
    return x


def quotient_basis(F: CField, sub: np.ndarray, d: int) -> np.ndarray:
    """Standard basis vectors completing the rows of sub to a basis of C^d."""
    r, piv = rref(F, sub) if sub.shape[0] else (sub, [])
    rest = [c for c in range(d) if c not in set(piv)]
    out = zeros(len(rest), d)
    for i, c in enumerate(rest):
        out[i, c] = 1
    return out


def inverse(F: CField, a: np.ndarray) -> np.ndarray:
    d = a.shape[0]
    x = solve_left(F, a, identity(F, d))
    if x is None:
        raise ZeroDivisionError("singular matrix")
    return x


def nonzero_count(a: np.ndarray) -> int:
    return int(np.count_nonzero(a))


def sparse_solve(F: CField, rows: list[dict[int, int]], rhs: list[int], ncols: int,
                 track: bool = False):
    """
    Solve sum_c rows[r][c] x_c = rhs[r] by elimination on dict rows.

    Returns (x, None) on success.  On failure returns (None, y) where y maps
    equation indices to coefficients with y K = 0 and y b != 0 (y is only
    computed when track is set; otherwise it is an empty dict).
    """
    mul, add, neg, inv = F.mul, F.add, F.neg, F.inv
    piv: dict[int, tuple[dict[int, int], int, dict[int, int]]] = {}
    for r, (row, b) in enumerate(zip(rows, rhs)):
        row = {c: v for c, v in row.items() if v}
        comb = {r: 1} if track else {}
        while row:
            c = min(row)
            if c not in piv:
                break
            prow, pb, pcomb = piv[c]
            f = neg(row[c])
            for cc, vv in prow.items():
                nv = add(row.get(cc, 0), mul(f, vv))
                if nv:
                    row[cc] = nv
                else:
                    row.pop(cc, None)
            b = add(b, mul(f, pb))
            for k, vv in pcomb.items():
                nv = add(comb.get(k, 0), mul(f, vv))
                if nv:
                    comb[k] = nv
                else:
                    comb.pop(k, None)
        if not row:
            if b:
                return None, comb
            continue
        c = min(row)
        s = inv(row[c])
        row = {cc: mul(s, vv) for cc, vv in row.items()}
        piv[c] = (row, mul(s, b), {k: mul(s, vv) for k, vv in comb.items()})
    # back substitution, free variables zero
    x = [0] * ncols
    for c in sorted(piv, reverse=True):
        row, b, _ = piv[c]
        acc = b
        for cc, vv in row.items():
            if cc != c:
                acc = add(acc, neg(mul(vv, x[cc])))
        x[c] = acc
    return np.array(x, dtype=np.int64), None
