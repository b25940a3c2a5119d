"""
Finite-dimensional right modules over the pro-p Iwahori-Hecke algebra H of
GL_n(F), and over the algebras H_M of standard Levi subgroups M.

A module is a set of generator matrices over C (row vectors, right action).
For a Levi with diagonal blocks B_0, B_1, ... the generators are

    s{i}   T for the simple reflection s_i, i inside a block
    a{b}   T for the affine simple reflection of block b (size >= 2)
    o{b}   T for the length-zero element omega_b of block b, oi{b} its inverse
    t{i}   T for diag(1, .., [g], .., 1), g the fixed generator of k_F^x

so H itself is the one-block case.  Any element g of the extended affine Weyl
group (a monomial matrix) is evaluated by peeling simple reflections off the
right while the length drops, which leaves t * prod omega_b^{k_b} with t in
T(k_F); since lengths add along the way,

    T_g = T_t * prod T_{omega_b}^{k_b} * T_{s_1} * ... * T_{s_l}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import linalg as la
from .charfield import FieldParams
from .chevalley import MonomialMatrix, coroot_elt, omega, s_hat
from .weyl import AffineRoot, Root, affine_length, blocks_of

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Levi:
    n: int
    blocks: tuple[tuple[int, int], ...]

    @classmethod
    def full(cls, n: int) -> Levi:
        return cls(n, ((1, n),))

    @classmethod
    def from_simples(cls, n: int, simples: Iterable[int]) -> Levi:
        return cls(n, tuple(blocks_of(n, simples)))

    @property
    def simples(self) -> frozenset[int]:
        return frozenset(i for lo, hi in self.blocks for i in range(lo, hi))

    def block_of(self, j: int) -> int:
        for b, (lo, hi) in enumerate(self.blocks):
            if lo <= j <= hi:
                return b
        raise ValueError(j)

    def affine_roots(self) -> dict[str, AffineRoot]:
        out = {f"s{i}": AffineRoot(Root(i, i + 1), 0) for i in sorted(self.simples)}
        for b, (lo, hi) in enumerate(self.blocks):
            if hi > lo:
                out[f"a{b}"] = AffineRoot(Root(hi, lo), 1)
        return out

    @lru_cache(maxsize=None)
    def reflections(self) -> dict[str, MonomialMatrix]:
        return {k: s_hat(self.n, ar) for k, ar in self.affine_roots().items()}

    @lru_cache(maxsize=None)
    def omegas(self) -> dict[str, MonomialMatrix]:
        return {f"o{b}": omega(self.n, lo, hi) for b, (lo, hi) in enumerate(self.blocks)}

    def torus_gen(self, i: int, fp: FieldParams) -> MonomialMatrix:
        ph = [Fraction(0)] * self.n
        ph[i - 1] = Fraction(1, fp.q - 1)
        return MonomialMatrix.diag(ph)

    def gen_keys(self) -> list[str]:
        keys = list(self.affine_roots())
        for b in range(len(self.blocks)):
            keys += [f"o{b}", f"oi{b}"]
        return keys + [f"t{i}" for i in range(1, self.n + 1)]

    def length(self, g: MonomialMatrix) -> int:
        return affine_length(g.perm, g.vals, self.blocks)

    def contains(self, g: MonomialMatrix) -> bool:
        return all(self.block_of(g.perm[k]) == self.block_of(k + 1) for k in range(self.n))

    def element(self, key: str, fp: FieldParams) -> MonomialMatrix:
        if key.startswith("t"):
            return self.torus_gen(int(key[1:]), fp)
        if key.startswith("oi"):
            return self.omegas()[f"o{key[2:]}"].inverse()
        if key.startswith("o"):
            return self.omegas()[key]
        return self.reflections()[key]

    def positive_wrt(self, g: MonomialMatrix, ambient: Levi) -> bool:
        """<alpha, nu(lambda)> <= 0 for alpha > 0 in the ambient Levi but not in self."""
        lam = [0] * self.n
        for k in range(self.n):
            lam[g.perm[k] - 1] = g.vals[k]
        for lo, hi in ambient.blocks:
            for j in range(lo, hi + 1):
                for k in range(j + 1, hi + 1):
                    if self.block_of(j) != self.block_of(k) and lam[j - 1] < lam[k - 1]:
                        return False
        return True

    def __str__(self) -> str:
        return "x".join(f"GL{hi - lo + 1}" for lo, hi in self.blocks)


@lru_cache(maxsize=None)
def decompose(levi: Levi, g: MonomialMatrix) -> tuple[MonomialMatrix, tuple[int, ...], tuple[str, ...]]:
    """g = t * prod omega_b^{k_b} * s_{w_1} ... s_{w_l} with l = length(g), t in T_0."""
    if not levi.contains(g):
        raise ValueError("element is not in the Levi")
    refl = levi.reflections()
    cur, L, word = g, levi.length(g), []
    while L > 0:
        for key, s in refl.items():
            nxt = cur * s.inverse()
            if levi.length(nxt) == L - 1:
                cur, L = nxt, L - 1
                word.append(key)
                break
        else:
            raise AssertionError("no descent found")
    ks = tuple(sum(cur.vals[j - 1] for j in range(lo, hi + 1)) for lo, hi in levi.blocks)
    om = MonomialMatrix.identity(levi.n)
    for b, k in enumerate(ks):
        om = om * levi.omegas()[f"o{b}"] ** k
    t = cur * om.inverse()
    if not t.is_diagonal or any(t.vals):
        raise AssertionError("length-zero remainder is not t * omega^k")
    return t, ks, tuple(reversed(word))


@dataclass
class HModule:
    fp: FieldParams
    levi: Levi
    labels: list[str]
    mats: dict[str, np.ndarray]
    name: str = ""
    meta: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def F(self):
        return self.fp.C

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def n(self) -> int:
        return self.levi.n

    def I(self) -> np.ndarray:
        return la.identity(self.F, self.dim)

    def torus(self, t: MonomialMatrix) -> np.ndarray:
        key = ("torus", t)
        if key not in self._cache:
            if not t.is_diagonal or any(t.vals):
                raise ValueError("not in T_0")
            out = self.I()
            for i, (ph, _) in enumerate(t.diag_entries(), start=1):
                a = self.fp.teich_exponent(ph)
                if a:
                    out = la.matmul(self.F, out, self._tpow(i, a))
            self._cache[key] = out
        return self._cache[key]

    def _tpow(self, i: int, a: int) -> np.ndarray:
        """t_i^a, from a table of all powers built once per generator."""
        key = ("tpow", i)
        if key not in self._cache:
            t = self.mats[f"t{i}"]
            F = self.F
            if not np.any(t * (1 - np.eye(self.dim, dtype=np.int64))):
                dg = np.diag(t)
                pows = [np.diag(np.array([F.pow(int(x), e) for x in dg], dtype=np.int64))
                        for e in range(self.fp.q - 1)]
            else:
                pows = [self.I()]
                for _ in range(self.fp.q - 2):
                    pows.append(la.matmul(F, pows[-1], t))
            self._cache[key] = pows
        return self._cache[key][a % (self.fp.q - 1)]

    def _omega_part(self, ks: Sequence[int]) -> np.ndarray:
        out = self.I()
        for b, k in enumerate(ks):
            if k:
                g = self.mats[f"o{b}"] if k > 0 else self.mats[f"oi{b}"]
                out = la.matmul(self.F, out, la.matpow(self.F, g, abs(k)))
        return out

    def T(self, g: MonomialMatrix, star: bool = False) -> np.ndarray:
        """Action of T_g (or T*_g) for g in the extended affine Weyl group of the Levi."""
        key = ("T", g, star)
        if key not in self._cache:
            t, ks, word = decompose(self.levi, g)
            out = la.matmul(self.F, self.torus(t), self._omega_part(ks))
            for w in word:
                out = la.matmul(self.F, out, self.star(w) if star else self.mats[w])
            self._cache[key] = out
        return self._cache[key]

    def T_word(self, keys: Sequence[str]) -> np.ndarray:
        return la.mat_chain(self.F, [self.mats[k] for k in keys], self.dim)

    def c_matrix(self, a: Root) -> np.ndarray:
        """c = sum over x in k_F^x of T_{a^vee([x])}."""
        out = la.zeros(self.dim, self.dim)
        for k in range(self.fp.q - 1):
            out = la.add(self.F, out, self.torus(coroot_elt(self.n, a, Fraction(k, self.fp.q - 1))))
        return out

    def star(self, key: str) -> np.ndarray:
        """T*_s = T_s - c_s."""
        ck = ("star", key)
        if ck not in self._cache:
            a = self.levi.affine_roots()[key].root
            self._cache[ck] = la.sub(self.F, self.mats[key], self.c_matrix(a))
        return self._cache[ck]

    def is_diagonal_torus(self) -> bool:
        return all(not np.any(self.mats[f"t{i}"] * (1 - np.eye(self.dim, dtype=np.int64)))
                   for i in range(1, self.n + 1))

    def submodule(self, basis: np.ndarray, name: str = "", labels=None) -> HModule:
        mats = {k: la.restrict(self.F, basis, v) for k, v in self.mats.items()}
        return HModule(self.fp, self.levi, labels or _labels_for(self, basis), mats, name or self.name)

    def quotient(self, sub: np.ndarray, name: str = "") -> tuple[HModule, np.ndarray]:
        """Module on the complement of sub spanned by standard vectors; returns it and that basis."""
        comp = la.quotient_basis(self.F, sub, self.dim)
        full = np.vstack([sub, comp]) if sub.shape[0] else comp
        k = sub.shape[0]
        mats = {}
        for key, a in self.mats.items():
            x = la.solve_left(self.F, full, la.matmul(self.F, comp, a))
            mats[key] = x[:, k:]
        labels = [self.labels[int(np.nonzero(r)[0][0])] for r in comp]
        return HModule(self.fp, self.levi, labels, mats, name or self.name), comp

    def to_json(self) -> dict:
        F = self.F
        enc = lambda a: [[F.digits[int(x)].tolist() for x in row] for row in a]
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "hecke_module",
            "name": self.name,
            "levi_blocks": [list(b) for b in self.levi.blocks],
            "field": {"p": self.fp.p, "f": self.fp.f, "e": self.fp.e, "m": F.m,
                      "modulus": list(F.modulus), "zeta_p": self.fp.zeta_p},
            "meta": self.meta,
            "dim": self.dim,
            "basis": self.labels,
            "generators": {k: enc(self.mats[k]) for k in self.levi.gen_keys()},
        }


def _labels_for(M: HModule, basis: np.ndarray) -> list[str]:
    out = []
    for i, row in enumerate(basis):
        nz = np.nonzero(row)[0]
        out.append(M.labels[int(nz[0])] if len(nz) == 1 and row[nz[0]] == 1 else f"v{i}")
    return out


def build_module(fp: FieldParams, levi: Levi, labels: list[str], mats: dict[str, np.ndarray],
                 name: str = "", meta: dict | None = None) -> HModule:
    """Fill in oi{b} as the inverse of o{b} and check that all generators are present."""
    F = fp.C
    mats = dict(mats)
    for b in range(len(levi.blocks)):
        if f"oi{b}" not in mats:
            mats[f"oi{b}"] = la.inverse(F, mats[f"o{b}"])
    missing = [k for k in levi.gen_keys() if k not in mats]
    if missing:
        raise ValueError(f"missing generators {missing}")
    return HModule(fp, levi, list(labels), mats, name, meta or {})


def character_module(fp: FieldParams, levi: Levi, s_value: int) -> HModule:
    """One-dimensional module: every T_s acts by s_value, torus and omegas by 1."""
    one = np.ones((1, 1), dtype=np.int64)
    mats = {k: one.copy() for k in levi.gen_keys()}
    for k in levi.affine_roots():
        mats[k] = np.full((1, 1), s_value, dtype=np.int64)
    return HModule(fp, levi, ["e"], mats, "sign" if s_value else "trivial")


def trivial_module(fp: FieldParams, levi: Levi) -> HModule:
    return character_module(fp, levi, 0)


def sign_module(fp: FieldParams, levi: Levi) -> HModule:
    return character_module(fp, levi, fp.C.neg(1))


@dataclass
class RelationReport:
    checks: list[tuple[str, bool]] = field(default_factory=list)

    def add(self, name: str, ok: bool):
        self.checks.append((name, bool(ok)))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok in self.checks)

    @property
    def violations(self) -> list[str]:
        return [name for name, ok in self.checks if not ok]

    def __len__(self) -> int:
        return len(self.checks)


def _eq(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and bool(np.all(a == b))


def check_relations(M: HModule) -> RelationReport:
    """Quadratic, braid, torus and omega relations on the generator matrices."""
    F, fp, lv = M.F, M.fp, M.levi
    rep = RelationReport()
    mm = lambda *xs: la.mat_chain(F, xs, M.dim)
    tor = [M.mats[f"t{i}"] for i in range(1, M.n + 1)]
    for i, a in enumerate(tor, start=1):
        rep.add(f"t{i}^(q-1)=1", _eq(la.matpow(F, a, fp.q - 1), M.I()))
        for j in range(i + 1, M.n + 1):
            rep.add(f"t{i}t{j}=t{j}t{i}", _eq(mm(a, tor[j - 1]), mm(tor[j - 1], a)))
    refl = lv.reflections()
    for key, s in refl.items():
        S = M.mats[key]
        for i in range(1, M.n + 1):
            t = lv.torus_gen(i, fp)
            rep.add(f"t{i}{key}={key}t'", _eq(mm(tor[i - 1], S), mm(S, M.torus(s.inverse() * t * s))))
        rep.add(f"{key}^2=c{key}", _eq(mm(S, S), mm(M.c_matrix(lv.affine_roots()[key].root), S)))
    for b in range(len(lv.blocks)):
        O, Oi = M.mats[f"o{b}"], M.mats[f"oi{b}"]
        w = lv.omegas()[f"o{b}"]
        rep.add(f"o{b}oi{b}=1", _eq(mm(O, Oi), M.I()))
        for i in range(1, M.n + 1):
            t = lv.torus_gen(i, fp)
            rep.add(f"o{b}t{i}oi{b}", _eq(mm(O, tor[i - 1], Oi), M.torus(w * t * w.inverse())))
        for key, s in refl.items():
            rep.add(f"o{b}{key}oi{b}", _eq(mm(O, M.mats[key], Oi), M.T(w * s * w.inverse())))
    for (k1, s1), (k2, s2) in combinations(refl.items(), 2):
        order = _braid_order(lv, k1, k2)
        if order is None:
            continue
        a = [s1, s2] * order
        b = [s2, s1] * order
        ga, gb = _prod(a[:order], M.n), _prod(b[:order], M.n)
        t = ga * gb.inverse()
        lhs = mm(*[M.mats[k1] if i % 2 == 0 else M.mats[k2] for i in range(order)])
        rhs = mm(M.torus(t), *[M.mats[k2] if i % 2 == 0 else M.mats[k1] for i in range(order)])
        rep.add(f"braid({k1},{k2})", _eq(lhs, rhs))
    return rep


def _prod(ms: Sequence[MonomialMatrix], n: int) -> MonomialMatrix:
    out = MonomialMatrix.identity(n)
    for x in ms:
        out = out * x
    return out


def _braid_order(lv: Levi, k1: str, k2: str) -> int | None:
    """m(s, s') for the affine type-A diagram of each block; None when infinite."""
    ar = lv.affine_roots()
    r1, r2 = ar[k1].root, ar[k2].root
    b1, b2 = lv.block_of(r1.j), lv.block_of(r2.j)
    if b1 != b2:
        return 2
    lo, hi = lv.blocks[b1]
    size = hi - lo + 1
    if size == 2:
        return None
    # nodes of the cyclic diagram: simple i -> i - lo, affine -> size - 1
    node = lambda k, r: (size - 1) if k.startswith("a") else r.j - lo
    d = abs(node(k1, r1) - node(k2, r2)) % size
    return 3 if d in (1, size - 1) else 2


# ---- adjoint functors -------------------------------------------------------

def lambda_i(n: int, i: int, inverse: bool = False) -> MonomialMatrix:
    """lambda_i = diag(1^i, varpi^{n-i}), or its inverse."""
    s = -1 if inverse else 1
    return MonomialMatrix.diag(vals=[0] * i + [s] * (n - i))


def _prod_lambdas(n: int, idx: Iterable[int], inverse: bool) -> MonomialMatrix:
    out = MonomialMatrix.identity(n)
    for i in sorted(idx):
        out = out * lambda_i(n, i, inverse)
    return out


def _check_sub(M: HModule, simples: Iterable[int]) -> frozenset[int]:
    J = frozenset(simples)
    if not J <= M.levi.simples:
        raise ValueError("target Levi is not contained in the module's Levi")
    return J


def lambda_plus(M: HModule, simples: Iterable[int]) -> MonomialMatrix:
    J = _check_sub(M, simples)
    return _prod_lambdas(M.n, M.levi.simples - J, inverse=True)


def lambda_minus(M: HModule, simples: Iterable[int]) -> MonomialMatrix:
    """Central in the reflected Levi M' (simples i -> lo+hi-1-i in each ambient block)."""
    J = _check_sub(M, simples)
    Jp = set()
    for i in J:
        lo, hi = M.levi.blocks[M.levi.block_of(i)]
        Jp.add(lo + hi - 1 - i)
    return _prod_lambdas(M.n, M.levi.simples - Jp, inverse=False)


@dataclass
class RightAdjoint:
    basis: np.ndarray
    module: HModule | None

    @property
    def dim(self) -> int:
        return self.basis.shape[0]


def right_adjoint(M: HModule, simples: Iterable[int]) -> RightAdjoint:
    """Stable image of T_{lambda+} with the H_{M'}-action transported through positive elements."""
    J = _check_sub(M, simples)
    F = M.F
    sub = Levi.from_simples(M.n, J)
    lp = lambda_plus(M, J)
    A = M.T(lp)
    V = la.eventual_image(F, A)
    if V.shape[0] == 0:
        return RightAdjoint(V, None)
    AV = la.restrict(F, V, A)
    AVi = la.inverse(F, AV)
    mats = {}
    for key in sub.gen_keys():
        h = sub.element(key, M.fp)
        N = 0
        while not sub.positive_wrt(lp ** N * h, M.levi):
            N += 1
            if N > 4 * M.n:
                raise AssertionError("no positive translate found")
        B = la.restrict(F, V, M.T(lp ** N * h))
        mats[key] = la.matmul(F, la.matpow(F, AVi, N), B)
    R = HModule(M.fp, sub, _labels_for(M, V), mats, f"R[{sub}]({M.name})")
    return RightAdjoint(V, R)


def left_adjoint(M: HModule, simples: Iterable[int]) -> np.ndarray:
    """Image of the stable power of T*_{lambda-}; its dimension is dim L(M)."""
    F = M.F
    X = M.T(lambda_minus(M, simples), star=True)
    return la.eventual_image(F, X)


def left_adjoint_dim(M: HModule, simples: Iterable[int]) -> int:
    return left_adjoint(M, simples).shape[0]


def proper_levis(M: HModule, all_levis: bool = False) -> list[frozenset[int]]:
    J = sorted(M.levi.simples)
    if all_levis:
        return [frozenset(c) for r in range(len(J)) for c in combinations(J, r)]
    return [frozenset(J) - {i} for i in J]


def is_supersingular(M: HModule, all_levis: bool = False) -> bool:
    for J in proper_levis(M, all_levis):
        if right_adjoint(M, J).dim or left_adjoint_dim(M, J):
            return False
    return True


# ---- equivariant maps and splittings ---------------------------------------

def _sylvester_system(F, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Matrix K with K vec(Y) = vec(A Y - Y B) for Y of shape (A.rows, B.rows), row-major."""
    da, db = A.shape[0], B.shape[0]
    Ia, Ib = np.eye(da, dtype=np.int64), np.eye(db, dtype=np.int64)
    K1 = (A[:, None, :, None] * Ib[None, :, None, :]).reshape(da * db, da * db)
    K2 = (Ia[:, None, :, None] * B.T[None, :, None, :]).reshape(da * db, da * db)
    return la.sub(F, K1, K2)


def find_equivariant_maps(src: HModule, tgt: HModule, keys: Sequence[str] | None = None) -> list[np.ndarray]:
    """Basis of Hom_H(src, tgt) as matrices X with v -> v X."""
    F = src.F
    keys = keys or src.levi.gen_keys()
    K = np.vstack([_sylvester_system(F, src.mats[k], tgt.mats[k]) for k in keys])
    ns = la.nullspace(F, K)
    return [row.reshape(src.dim, tgt.dim) for row in ns]


def find_isomorphism(src: HModule, tgt: HModule) -> np.ndarray | None:
    if src.dim != tgt.dim:
        return None
    F = src.F
    maps = find_equivariant_maps(src, tgt)
    if not maps:
        return None
    # a generic combination is invertible if any is; try a deterministic sweep
    for X in maps:
        if la.rank(F, X) == src.dim:
            return X
    acc = la.zeros(src.dim, tgt.dim)
    for i, X in enumerate(maps):
        acc = la.add(F, acc, la.scale(F, F.exp(3 * i + 1), X))
        if la.rank(F, acc) == src.dim:
            return acc
    return None


def is_equivariant(src: HModule, tgt: HModule, X: np.ndarray) -> list[str]:
    """Generators at which X fails to intertwine."""
    F = src.F
    return [k for k in src.levi.gen_keys()
            if not _eq(la.matmul(F, src.mats[k], X), la.matmul(F, X, tgt.mats[k]))]


@dataclass
class SplitResult:
    split: bool
    section: np.ndarray | None = None
    witness: np.ndarray | None = None


def find_splitting(total: HModule, k: int) -> SplitResult:
    """
    total has basis (sub | quotient) with the first k vectors spanning a submodule.
    A section of total -> quotient is [Y | I] with A^Q_g Y - Y A^S_g = C_g, C_g the
    quotient-to-sub block of g.  When the system is inconsistent, the witness is a
    functional killing every equation's left side but not the right side.
    """
    F = total.F
    d = total.dim
    keys = total.levi.gen_keys()
    for key in keys:
        if np.any(total.mats[key][:k, k:]):
            raise ValueError("first k basis vectors do not span a submodule")
    if total.is_diagonal_torus():
        return _split_weighted(total, k)
    Ks, rhs = [], []
    for key in keys:
        A = total.mats[key]
        AS, AQ, C = A[:k, :k], A[k:, k:], A[k:, :k]
        Ks.append(_sylvester_system(F, AQ, AS))
        rhs.append(C.reshape(-1))
    K = np.vstack(Ks)
    b = np.concatenate(rhs)
    x = la.solve_left(F, K.T.copy(), b)
    if x is None:
        return SplitResult(False, witness=_witness(F, K, b))
    Y = x.reshape(d - k, k)
    sec = np.concatenate([Y, np.eye(d - k, dtype=np.int64)], axis=1)
    return SplitResult(True, section=sec)


def _witness(F, K: np.ndarray, b: np.ndarray) -> np.ndarray:
    """y with y K = 0 and y b = 1."""
    aug = np.concatenate([K, b[:, None]], axis=1)
    e = la.zeros(1, aug.shape[1])
    e[0, -1] = 1
    y = la.solve_left(F, aug, e)
    if y is None:
        raise AssertionError("inconsistent system without witness")
    return y[0]


def _split_weighted(total: HModule, k: int) -> SplitResult:
    """
    find_splitting when the torus is diagonal: each torus equation fixes Y_ij
    unless the weights of quotient vector i and sub vector j agree, so only
    equal-weight pairs stay unknown.  The witness refers to the reduced system.
    """
    F = total.F
    d = total.dim
    dq = d - k
    tk = [key for key in total.levi.gen_keys() if key.startswith("t")]
    Y = la.zeros(dq, k)
    known = np.zeros((dq, k), dtype=bool)
    for t in tk:
        A = total.mats[t]
        aq, as_, C = np.diag(A)[k:], np.diag(A)[:k], A[k:, :k]
        diff = F.add_t[aq[:, None], F.neg_t[as_[None, :]]]
        val = F.mul_t[C, F.inv_t[np.where(diff == 0, 1, diff)]]
        mask = diff != 0
        clash = known & mask & (Y != val)
        if np.any(clash) or np.any((diff == 0) & (C != 0)):
            return SplitResult(False)
        Y = np.where(mask & ~known, val, Y)
        known |= mask
    free = [(int(i), int(j)) for i, j in zip(*np.nonzero(~known))]
    rows: list[dict[int, int]] = []
    rhs: list[int] = []
    for key in total.levi.gen_keys():
        if key.startswith("t"):
            continue
        A = total.mats[key]
        AS, AQ, C = A[:k, :k], A[k:, k:], A[k:, :k]
        # residual right side after substituting the fixed entries
        b = la.sub(F, C, la.sub(F, la.matmul(F, AQ, Y), la.matmul(F, Y, AS)))
        eq: dict[int, dict[int, int]] = {}
        for c, (l, j) in enumerate(free):
            # AQ[i, l] Y[l, j] lands in equation (i, j); -Y[l, j] AS[j, j'] in (l, j')
            for i in np.nonzero(AQ[:, l])[0]:
                e = eq.setdefault(int(i) * k + j, {})
                e[c] = F.add(e.get(c, 0), int(AQ[i, l]))
            for jj in np.nonzero(AS[j, :])[0]:
                e = eq.setdefault(l * k + int(jj), {})
                e[c] = F.add(e.get(c, 0), F.neg(int(AS[j, jj])))
        bf = b.reshape(-1)
        for r in sorted(set(eq) | set(int(r) for r in np.nonzero(bf)[0])):
            rows.append(eq.get(r, {}))
            rhs.append(int(bf[r]))
    x, _ = la.sparse_solve(F, rows, rhs, len(free))
    if x is None:
        _, y = la.sparse_solve(F, rows, rhs, len(free), track=True)
        w = np.zeros(len(rows), dtype=np.int64)
        for r, v in y.items():
            w[r] = v
        return SplitResult(False, witness=w)
    for c, (i, j) in enumerate(free):
        Y[i, j] = x[c]
    sec = np.concatenate([Y, np.eye(dq, dtype=np.int64)], axis=1)
    if is_equivariant_section(total, k, sec):
        return SplitResult(True, section=sec)
    raise AssertionError("reduced solve produced a non-equivariant section")


def is_equivariant_section(total: HModule, k: int, sec: np.ndarray) -> bool:
    """The rows of sec span a complement to the sub that is stable under every generator."""
    F = total.F
    return all(la.in_span(F, sec, la.matmul(F, sec, total.mats[key])) for key in total.levi.gen_keys())


def direct_sum(mods: Sequence[HModule], name: str = "") -> HModule:
    keys = mods[0].levi.gen_keys()
    d = sum(m.dim for m in mods)
    mats = {}
    for key in keys:
        out = la.zeros(d, d)
        o = 0
        for m in mods:
            out[o:o + m.dim, o:o + m.dim] = m.mats[key]
            o += m.dim
        mats[key] = out
    labels = [l for m in mods for l in m.labels]
    return HModule(mods[0].fp, mods[0].levi, labels, mats, name)


def dump_json(M: HModule) -> str:
    return json.dumps(M.to_json(), sort_keys=True, separators=(",", ":"))
