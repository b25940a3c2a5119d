"""
Brute-force p-adic matrix checks over Q_p.

Entries are exact rationals; the only approximation is the Teichmuller lift,
which is accurate modulo p^N with N = K + 2V.  Every entry is renormalised to
p^v * (unit mod p^N), and anything of valuation >= K counts as zero, so a
verdict reached here is a statement modulo p^K.

The group-theoretic side (coset representatives, xi_x(h), structure
constants, conjugations) is computed from matrices alone.  Characters of T
are evaluated through charfield, and the Hecke action on H^1 is the
evaluation of the Shapiro-transferred cocycle formula on sample elements.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product

import numpy as np

from .charfield import FieldParams, SmoothCharacter
from .chevalley import MonomialMatrix, coroot_elt, d_const, frak_s, lift, s_hat
from .heckemod import Levi
from .weyl import (AffineRoot, Root, WeylElt, W_beta_prime, act, affine_simple_roots,
                   all_elements, all_roots, positive_roots)


class PrecisionError(AssertionError):
    pass


@dataclass(frozen=True)
class Ctx:
    p: int
    K: int = 8
    V: int = 4

    @property
    def N(self) -> int:
        return self.K + 2 * self.V

    @cached_property
    def pN(self) -> int:
        return self.p ** self.N

    def val(self, x: Fraction) -> float:
        """Valuation, +inf for anything below the precision window."""
        if x == 0:
            return float("inf")
        v = 0
        a, b = x.numerator, x.denominator
        while a % self.p == 0:
            a //= self.p
            v += 1
        while b % self.p == 0:
            b //= self.p
            v -= 1
        return float("inf") if v >= self.K else v

    def red(self, x: Fraction) -> Fraction:
        if x == 0:
            return x
        a, b, v = x.numerator, x.denominator, 0
        while a % self.p == 0:
            a //= self.p
            v += 1
        while b % self.p == 0:
            b //= self.p
            v -= 1
        u = a * pow(b, -1, self.pN) % self.pN
        if u > self.pN // 2:
            u -= self.pN
        return Fraction(u) * Fraction(self.p) ** v

    def residue(self, x: Fraction) -> int:
        if self.val(x) < 0:
            raise PrecisionError(f"{x} is not integral")
        if self.val(x) == float("inf"):
            return 0
        return x.numerator * pow(x.denominator, -1, self.p) % self.p

    @lru_cache(maxsize=None)
    def teich(self, x: int) -> int:
        x %= self.p
        if x == 0:
            return 0
        t = x
        for _ in range(self.N):
            t = pow(t, self.p, self.pN)
        return t - self.pN if t > self.pN // 2 else t


@dataclass(frozen=True)
class TruncMatrix:
    ctx: Ctx
    rows: tuple[tuple[Fraction, ...], ...]

    @property
    def n(self) -> int:
        return len(self.rows)

    @classmethod
    def make(cls, ctx: Ctx, rows) -> TruncMatrix:
        return cls(ctx, tuple(tuple(ctx.red(Fraction(x)) for x in r) for r in rows))

    @classmethod
    def identity(cls, ctx: Ctx, n: int) -> TruncMatrix:
        return cls.make(ctx, [[int(i == j) for j in range(n)] for i in range(n)])

    def __getitem__(self, ij) -> Fraction:
        return self.rows[ij[0]][ij[1]]

    def __mul__(self, o: TruncMatrix) -> TruncMatrix:
        n = self.n
        return TruncMatrix.make(self.ctx, [[sum(self.rows[i][k] * o.rows[k][j] for k in range(n))
                                            for j in range(n)] for i in range(n)])

    def inverse(self) -> TruncMatrix:
        n = self.n
        a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self.rows)]
        for c in range(n):
            piv = min((r for r in range(c, n) if a[r][c] != 0), key=lambda r: self.ctx.val(a[r][c]),
                      default=None)
            if piv is None or self.ctx.val(a[piv][c]) == float("inf"):
                raise PrecisionError("singular within the precision window")
            a[c], a[piv] = a[piv], a[c]
            s = 1 / a[c][c]
            a[c] = [x * s for x in a[c]]
            for r in range(n):
                if r != c and a[r][c] != 0:
                    f = a[r][c]
                    a[r] = [x - f * y for x, y in zip(a[r], a[c])]
        return TruncMatrix.make(self.ctx, [r[n:] for r in a])

    def eq(self, o: TruncMatrix) -> bool:
        return all(self.ctx.val(x - y) == float("inf")
                   for r1, r2 in zip(self.rows, o.rows) for x, y in zip(r1, r2))

    def in_I1(self) -> bool:
        v = self.ctx.val
        for i in range(self.n):
            for j in range(self.n):
                x = self.rows[i][j]
                if i == j and v(x - 1) < 1:
                    return False
                if i > j and v(x) < 1:
                    return False
                if i < j and v(x) < 0:
                    return False
        return True

    def in_T1(self) -> bool:
        return self.in_I1() and all(self.ctx.val(self.rows[i][j]) == float("inf")
                                    for i in range(self.n) for j in range(self.n) if i != j)

    def __str__(self) -> str:
        return "[" + "; ".join(" ".join(str(x) for x in r) for r in self.rows) + "]"


# ---- group elements --------------------------------------------------------

@dataclass(eq=False)
class Oracle:
    fp: FieldParams
    n: int
    K: int = 8
    V: int = 4

    def __post_init__(self):
        if not self.fp.is_Qp:
            raise ValueError("the matrix oracle works over Q_p only")
        self.p = self.fp.p
        self.ctx = Ctx(self.p, self.K, self.V)
        C = self.fp.C
        gen = C.exp(self.fp.gq_log)
        self.g = next(a for a in range(1, self.p) if C.from_int(a) == gen)
        self._memo: dict = {}

    def memo(self, key, fn):
        if key not in self._memo:
            self._memo[key] = fn()
        return self._memo[key]

    # elements
    def I(self) -> TruncMatrix:
        return TruncMatrix.identity(self.ctx, self.n)

    def teich(self, x: int) -> int:
        return self.ctx.teich(x)

    def phase_value(self, ph: Fraction) -> int:
        k = self.fp.teich_exponent(ph)
        return self.teich(pow(self.g, k, self.p))

    def mono(self, m: MonomialMatrix) -> TruncMatrix:
        n = self.n
        rows = [[Fraction(0)] * n for _ in range(n)]
        for k in range(n):
            rows[m.perm[k] - 1][k] = Fraction(self.phase_value(m.phases[k])) * Fraction(self.p) ** m.vals[k]
        return TruncMatrix.make(self.ctx, rows)

    def u(self, a: Root, y) -> TruncMatrix:
        rows = [[Fraction(int(i == j)) for j in range(self.n)] for i in range(self.n)]
        rows[a.j - 1][a.k - 1] = Fraction(y)
        return TruncMatrix.make(self.ctx, rows)

    def ua(self, ar: AffineRoot, y) -> TruncMatrix:
        return self.u(ar.root, Fraction(y) * Fraction(self.p) ** ar.level)

    def coroot(self, a: Root, x) -> TruncMatrix:
        x = Fraction(x)
        rows = [[Fraction(int(i == j)) for j in range(self.n)] for i in range(self.n)]
        rows[a.j - 1][a.j - 1] = x
        rows[a.k - 1][a.k - 1] = 1 / x
        return TruncMatrix.make(self.ctx, rows)

    def diag(self, xs) -> TruncMatrix:
        return TruncMatrix.make(self.ctx, [[Fraction(xs[i]) if i == j else 0 for j in range(self.n)]
                                           for i in range(self.n)])

    def s_hat(self, ar: AffineRoot) -> TruncMatrix:
        return self.mono(s_hat(self.n, ar))

    def lift(self, w: WeylElt) -> TruncMatrix:
        return self.mono(lift(w))

    def root_value(self, a: Root, t: TruncMatrix) -> Fraction:
        return t[a.j - 1, a.j - 1] / t[a.k - 1, a.k - 1]

    # ---- coset transfer -----------------------------------------------------

    @lru_cache(maxsize=None)
    def g_x(self, ar: AffineRoot, x: int) -> TruncMatrix:
        return self.s_hat(ar) * self.ua(ar, self.teich(x))

    @lru_cache(maxsize=None)
    def g_x_inv(self, ar: AffineRoot, x: int) -> TruncMatrix:
        return self.g_x(ar, x).inverse()

    def coset_transfer(self, ar: AffineRoot, x: int, h: TruncMatrix) -> tuple[int, TruncMatrix]:
        """The unique x' with g_x h g_{x'}^{-1} in I_1, and that element."""
        return self.memo(("ct", ar, x, h), lambda: self._coset_transfer(ar, x, h))

    def _coset_transfer(self, ar: AffineRoot, x: int, h: TruncMatrix) -> tuple[int, TruncMatrix]:
        if not h.in_I1():
            raise ValueError("h is not in I_1")
        gh = self.g_x(ar, x) * h
        hits = []
        for x2 in range(self.p):
            xi = gh * self.g_x_inv(ar, x2)
            if xi.in_I1():
                hits.append((x2, xi))
        if len(hits) != 1:
            raise PrecisionError(f"{len(hits)} coset candidates")
        return hits[0]

    # ---- structure constants by matrices ---------------------------------------

    def d_matrix(self, a: Root, b: Root) -> int:
        """frak_s_a u_b(1) frak_s_a^{-1} = u_{s_a b}(d)."""
        s = self.mono(frak_s(self.n, a))
        m = s * self.u(b, 1) * s.inverse()
        tgt = act(WeylElt.reflection(self.n, a), b)
        d = m[tgt.j - 1, tgt.k - 1]
        if d not in (1, -1):
            raise AssertionError("d is not a sign")
        return int(d)

    def c_matrix(self, a: Root, b: Root) -> int:
        """[u_a(1), u_b(1)] = u_{a+b}(c)."""
        ua, ub = self.u(a, 1), self.u(b, 1)
        m = ua * ub * ua.inverse() * ub.inverse()
        s = _root_sum(a, b)
        return int(m[s.j - 1, s.k - 1]) if s else 0

    # ---- Iwahori factorization -----------------------------------------------

    def iwahori_factor(self, h: TruncMatrix, order: str = "height"):
        """
        h = (prod over negative roots u_g(y)) * t * (prod over positive roots u_g(y)),
        factors listed in the product order.  The order of each unipotent block is
        by increasing height, ties broken by (j, k) or its reverse.
        """
        n = self.n
        ctx = self.ctx
        # LDU by elimination
        a = [list(r) for r in h.rows]
        L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        for c in range(n):
            if ctx.val(a[c][c]) != 0:
                raise PrecisionError("not in the big cell with unit pivots")
            for r in range(c + 1, n):
                f = a[r][c] / a[c][c]
                L[r][c] = f
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
        D = [a[i][i] for i in range(n)]
        U = [[a[i][j] / D[i] for j in range(n)] for i in range(n)]
        Lm = TruncMatrix.make(ctx, L)
        Um = TruncMatrix.make(ctx, U)
        lower = self._unip_factor(Lm, [r for r in all_roots(n) if not r.positive], order)
        upper = self._unip_factor(Um, positive_roots(n), order)
        return lower, self.diag(D), upper

    def _unip_factor(self, u: TruncMatrix, roots, order: str):
        key = (lambda r: (abs(r.k - r.j), r.j, r.k)) if order == "height" else \
              (lambda r: (abs(r.k - r.j), -r.j, -r.k))
        roots = sorted(roots, key=key)
        cur = u
        out = []
        for r in roots:
            y = cur[r.j - 1, r.k - 1]
            out.append((r, y))
            cur = self.u(r, -y) * cur
        if not cur.eq(self.I()):
            raise PrecisionError("unipotent factorization did not terminate at 1")
        return out

    def multiply_factors(self, lower, t, upper) -> TruncMatrix:
        out = self.I()
        for r, y in lower:
            out = out * self.u(r, y)
        out = out * t
        for r, y in upper:
            out = out * self.u(r, y)
        return out

    def frame_factor(self, h: TruncMatrix, w: WeylElt, order: str = "height"):
        """h in w^{-1} B w: h = t * prod u_g(y_g) over g in w^{-1}Phi+, by increasing height of w(g)."""
        return self.memo(("ff", h, w, order), lambda: self._frame_factor(h, w, order))

    def _frame_factor(self, h: TruncMatrix, w: WeylElt, order: str):
        n = self.n
        t = self.diag([h[i, i] for i in range(n)])
        cur = t.inverse() * h
        roots = [r for r in all_roots(n) if act(w, r).positive]
        key = (lambda r: ((act(w, r).height), r.j, r.k)) if order == "height" else \
              (lambda r: ((act(w, r).height), -r.j, -r.k))
        out = {}
        for r in sorted(roots, key=key):
            y = cur[r.j - 1, r.k - 1]
            out[r] = y
            cur = self.u(r, -y) * cur
        if not cur.eq(self.I()):
            raise PrecisionError("element is not in w^{-1} B w")
        return t, out


@lru_cache(maxsize=8)
def shared_oracle(fp: FieldParams, n: int, K: int = 8, V: int = 4) -> Oracle:
    """One oracle per parameter set, so memoized transfers are reused across pieces."""
    return Oracle(fp, n, K, V)


def _root_sum(a: Root, b: Root) -> Root | None:
    if a.k == b.j and a.j != b.k:
        return Root(a.j, b.k)
    if b.k == a.j and b.j != a.k:
        return Root(b.j, a.k)
    return None


# ---- coset transfer identities ---------------------------------------------

@dataclass
class SuiteReport:
    checks: int = 0
    failures: list[str] = field(default_factory=list)

    def add(self, ok: bool, what: str):
        self.checks += 1
        if not ok:
            self.failures.append(what)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"checks": self.checks, "ok": self.ok, "failures": self.failures[:50]}


def y_samples(o: Oracle) -> list[int]:
    p = o.p
    return [0, 1, p - 1, o.teich(o.g), p, p + 1]


def t_samples(o: Oracle) -> list[TruncMatrix]:
    p, n = o.p, o.n
    pats = [[1 + p * (i + 1) for i in range(n)], [1 + p * (n - i) for i in range(n)],
            [1 + p * p] + [1] * (n - 1), [1 - p] + [1 + 2 * p] * (n - 1)]
    return [o.diag(x) for x in pats]


def beta_affine_roots(n: int) -> list[AffineRoot]:
    """(Phi+ x {0}) and (Phi- x {1}): the root subgroups generating I_1 with T_1."""
    return [AffineRoot(r, 0) for r in positive_roots(n)] + \
           [AffineRoot(Root(r.k, r.j), 1) for r in positive_roots(n)]


def verify_conj_suite(fp: FieldParams, n: int, K: int = 8, V: int = 4) -> SuiteReport:
    o = Oracle(fp, n, K, V)
    p = o.p
    rep = SuiteReport()
    P = Fraction(p)
    for al in affine_simple_roots(n):
        a, l = al.root, al.level
        minus_al = AffineRoot(Root(a.k, a.j), -l)
        sa = WeylElt.reflection(n, a)
        for x in range(p):
            tx = o.teich(x)
            for be in beta_affine_roots(n):
                b, m = be.root, be.level
                pair = b.pairing(a.coroot(n))
                for y in y_samples(o):
                    h = o.ua(be, y)
                    x2, xi = o.coset_transfer(al, x, h)
                    tag = f"{al} {be} x={x} y={y}"
                    if be == al:
                        yb = y % p
                        rep.add(x2 == (x + yb) % p, "own root, x: " + tag)
                        want = o.ua(minus_al, o.teich(x + yb) - tx - y)
                        rep.add(xi.eq(want), "own root, xi: " + tag)
                    elif b != Root(a.k, a.j):
                        rep.add(x2 == x, "other root, x: " + tag)
                        want = o.I()
                        s = _root_sum(a, b)
                        if s is not None:
                            c = o.c_matrix(a, b)
                            d = o.d_matrix(a, s)
                            want = want * o.u(act(sa, s), d * c * P ** (-l + m - l * pair) * tx * y)
                        d = o.d_matrix(a, b)
                        want = want * o.u(act(sa, b), d * P ** (m - l * pair) * y)
                        rep.add(xi.eq(want), "other root, xi: " + tag)
                    else:
                        rep.add(x2 == x, "opposite root, x: " + tag)
                        nu = 1 + P * tx * y
                        nup = 1 - P * tx * y
                        w1 = o.ua(al, -P * y / nu) * o.coroot(a, 1 / nu) * o.ua(be, tx * tx * y / nu)
                        w2 = o.ua(be, tx * tx * y / nup) * o.coroot(a, nup) * o.ua(al, -P * y / nup)
                        rep.add(xi.eq(w1) and xi.eq(w2), "opposite root, xi: " + tag)
                    if x == 0:
                        continue
                    ix = Fraction(1, tx)
                    conj = o.ua(al, ix) * xi * o.ua(al, -ix)
                    if be == al:
                        continue
                    if b != Root(a.k, a.j):
                        want = o.I()
                        s = _root_sum(Root(a.k, a.j), b)
                        if s is not None:
                            c = o.c_matrix(Root(a.k, a.j), b)
                            want = want * o.u(s, c * (-1) ** (pair % 2) * P ** (-l + m)
                                              * Fraction(tx) ** (1 - pair) * y)
                        want = want * o.u(b, P ** m * (-ix) ** pair * y)
                        rep.add(conj.eq(want), "recentred, other root: " + tag)
                    else:
                        rep.add(conj.eq(o.ua(be, tx * tx * y)), "recentred, opposite root: " + tag)
            for k, t in enumerate(t_samples(o)):
                x2, xi = o.coset_transfer(al, x, t)
                sh = o.s_hat(al)
                av = o.root_value(a, t)
                want = sh * t * sh.inverse() * o.ua(minus_al, (1 - 1 / av) * tx)
                tag = f"{al} t{k} x={x}"
                rep.add(x2 == x and xi.eq(want), "torus: " + tag)
                if x:
                    ix = Fraction(1, tx)
                    conj = o.ua(al, ix) * xi * o.ua(al, -ix)
                    rep.add(conj.eq(t * o.ua(minus_al, (av - 1) * tx)), "recentred, torus: " + tag)
        # unip: u_{-al}(x) = u_al(x^-1) al^vee(x^-1) s_al^-1 u_al(x^-1)
        for z in [o.teich(x) for x in range(1, p)] + [1 + p, P, Fraction(1, p), 2 + 3 * p]:
            z = Fraction(z)
            lhs = o.ua(minus_al, z)
            rhs = o.ua(al, 1 / z) * o.coroot(a, 1 / z) * o.s_hat(al).inverse() * o.ua(al, 1 / z)
            rep.add(lhs.eq(rhs), f"unip {al} x={z}")
    # cocycle law on a few products
    for al in affine_simple_roots(n):
        hs = [o.ua(be, 1) for be in beta_affine_roots(n)[:3]] + t_samples(o)[:2]
        for x in range(p):
            for h1, h2 in product(hs, hs):
                x1, xi1 = o.coset_transfer(al, x, h1)
                x12, xi12 = o.coset_transfer(al, x, h1 * h2)
                x3, xi3 = o.coset_transfer(al, x1, h2)
                rep.add(x12 == x3 and xi12.eq(xi1 * xi3), f"cocycle {al} x={x}")
    # structure constants: matrices vs the sign bookkeeping of the formula layer
    for a in all_roots(n):
        for b in all_roots(n):
            if b not in (a, Root(a.k, a.j)):
                rep.add(o.d_matrix(a, b) == d_const(a, b, n), f"d {a} {b}")
    return rep


def verify_unip(fp: FieldParams, n: int, K: int = 8, V: int = 4) -> SuiteReport:
    o = Oracle(fp, n, K, V)
    rep = SuiteReport()
    for al in affine_simple_roots(n):
        a = al.root
        minus_al = AffineRoot(Root(a.k, a.j), -al.level)
        for x in range(1, o.p):
            z = Fraction(o.teich(x))
            lhs = o.ua(minus_al, z)
            rhs = o.ua(al, 1 / z) * o.coroot(a, 1 / z) * o.s_hat(al).inverse() * o.ua(al, 1 / z)
            rep.add(lhs.eq(rhs), f"unip {al} x={x}")
    return rep


def verify_factorization(fp: FieldParams, n: int, samples: int = 100, seed: int = 0,
                         K: int = 8, V: int = 4) -> SuiteReport:
    """Factor-then-multiply is the identity on pseudo-random elements of I_1."""
    o = Oracle(fp, n, K, V)
    rng = np.random.default_rng(seed)
    rep = SuiteReport()
    p = o.p
    for s in range(samples):
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                r = int(rng.integers(0, p ** 3))
                if i == j:
                    row.append(1 + p * r)
                elif i > j:
                    row.append(p * r)
                else:
                    row.append(r)
            rows.append(row)
        h = TruncMatrix.make(o.ctx, rows)
        lo, t, up = o.iwahori_factor(h)
        lo2, t2, up2 = o.iwahori_factor(h, order="reverse")
        rep.add(o.multiply_factors(lo, t, up).eq(h) and o.multiply_factors(lo2, t2, up2).eq(h),
                f"factor sample {s}")
        rep.add(t.in_T1(), f"torus part sample {s}")
    return rep


# ---- graded Hecke action ---------------------------------------------------

class CocycleClass:
    """
    A class in H^1(I_1, Ind(chi)) given by homomorphisms psi_w on I_1 cap w^-1 B w.
    Each psi_w is a sum of named basis homomorphisms with C-coefficients:
    ("theta", i) reads theta_i(w^ t w^^-1) and ("eta", g) reads the U_g-coordinate.

    Every evaluation factors its argument in two root orders; a disagreement is
    counted in order_mismatches rather than resolved.
    """

    def __init__(self, o: Oracle, terms: dict[WeylElt, list[tuple[tuple, int]]]):
        self.o = o
        self.terms = terms
        self.order_mismatches = 0

    def _eval(self, w: WeylElt, h: TruncMatrix, order: str) -> int:
        o = self.o
        C = o.fp.C
        t, coords = o.frame_factor(h, w, order)
        acc = 0
        for (kind, arg), c in self.terms[w]:
            if kind == "theta":
                # slot k of t lands in slot w(k) after conjugating by w^
                k = w.inverse()(arg)
                v = o.ctx.residue((t[k - 1, k - 1] - 1) / o.p)
            else:
                y = coords[arg]
                v = o.ctx.residue(y if arg.positive else y / o.p)
            acc = C.add(acc, C.mul(c, C.from_int(v)))
        return acc

    def __call__(self, w: WeylElt, h: TruncMatrix) -> int:
        if w not in self.terms:
            return 0
        if not h.in_I1():
            raise PrecisionError("argument is not in I_1")
        v = self._eval(w, h, "height")
        if v != self._eval(w, h, "reverse"):
            self.order_mismatches += 1
        return v


def act_reflection(o: Oracle, chi: SmoothCharacter, f: CocycleClass, al: AffineRoot,
                   w: WeylElt, h: TruncMatrix) -> int:
    """(f . T_{s_al})(h)(w^) from the Shapiro transfer of the cocycle action."""
    C = o.fp.C
    n = o.n
    a = al.root
    sa = WeylElt.reflection(n, a)
    ws = w * sa
    sh = s_hat(n, al)
    zeta = chi.eval(lift(w) * sh.inverse() * lift(ws).inverse())
    if act(w, a).positive:
        acc = 0
        for x in range(o.p):
            _, xi = o.coset_transfer(al, x, h)
            acc = C.add(acc, f(ws, xi))
        return C.mul(zeta, acc)
    _, xi0 = o.coset_transfer(al, 0, h)
    acc = C.mul(zeta, f(ws, xi0))
    wa = act(w, a)
    for x in range(1, o.p):
        _, xi = o.coset_transfer(al, x, h)
        ix = Fraction(1, o.teich(x))
        inner = o.memo(("in", al, x, h), lambda: o.ua(al, ix) * xi * o.ua(al, -ix))
        # chi o w(al^vee)(-[x]), with -[x] = [g]^k
        c = chi.eval(coroot_elt(n, wa, Fraction(_dlog(o, -x), o.p - 1)))
        acc = C.add(acc, C.mul(c, f(w, inner)))
    return acc


def _dlog(o: Oracle, x: int) -> int:
    k, y = 0, 1
    x %= o.p
    while y != x:
        y = y * o.g % o.p
        k += 1
    return k


def act_normalizer(o: Oracle, chi: SmoothCharacter, f: CocycleClass, om: MonomialMatrix,
                   w: WeylElt, h: TruncMatrix) -> int:
    """(f . T_om)(h)(w^) = zeta psi_{w om_bar^-1}(om h om^-1) for om normalizing I_1."""
    C = o.fp.C
    ob = om.weyl
    w2 = w * ob.inverse()
    zeta = chi.eval_inv(lift(w2) * om * lift(w).inverse())
    M = o.mono(om)
    return C.mul(zeta, f(w2, o.memo(("nc", om, h), lambda: M * h * M.inverse())))


def apply_generator(o: Oracle, chi: SmoothCharacter, f: CocycleClass, key: str,
                    w: WeylElt, h: TruncMatrix) -> int:
    lv = Levi.full(o.n)
    ars = lv.affine_roots()
    if key in ars:
        return act_reflection(o, chi, f, ars[key], w, h)
    return act_normalizer(o, chi, f, lv.element(key, o.fp), w, h)


@dataclass
class GradedTable:
    """Coefficient matrices read off by the oracle, rows and columns indexed by labels."""
    labels: list[str]
    mats: dict[str, np.ndarray]
    zero_checks: int
    failures: list[str]
    cross: dict[str, np.ndarray] = field(default_factory=dict)
    cross_labels: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _eta_samples(o: Oracle, g: Root) -> list[Fraction]:
    s = Fraction(1) if g.positive else Fraction(o.p)
    return [s * v for v in (1, o.teich(o.g), 1 + o.p)]


def _eta_read(o: Oracle, g: Root, y: Fraction) -> int:
    return o.fp.C.from_int(o.ctx.residue(y if g.positive else y / o.p))


def _theta_coeffs(o: Oracle, chi, f, key, w2) -> list[int]:
    """Coefficients of theta_1^{w2}..theta_n^{w2} in (f . T)_{w2} restricted to T_1."""
    out = []
    for i in range(1, o.n + 1):
        diag = [1] * o.n
        diag[w2.inverse()(i) - 1] = 1 + o.p
        out.append(apply_generator(o, chi, f, key, w2, o.diag(diag)))
    return out


def _theta_linear(o: Oracle, chi, f, key, w2, coeffs, ts) -> bool:
    C = o.fp.C
    for t in ts:
        pred = 0
        for i in range(1, o.n + 1):
            k = w2.inverse()(i)
            th = C.from_int(o.ctx.residue((t[k - 1, k - 1] - 1) / o.p))
            pred = C.add(pred, C.mul(coeffs[i - 1], th))
        if apply_generator(o, chi, f, key, w2, t) != pred:
            return False
    return True


def default_keys(n: int) -> list[str]:
    return Levi.full(n).gen_keys()


def oracle_graded_action(fp: FieldParams, chi: SmoothCharacter, beta: Root, r: int = 0,
                         K: int = 8, V: int = 4, keys=None, with_cross: bool = True) -> GradedTable:
    """
    Act on each eta^w (w in W'_beta) by each generator and evaluate on u_{w2^-1 gamma}(y)
    for every w2 and every positive gamma with ht gamma >= ht beta.  The gamma = beta
    values give the graded matrix; every other value must vanish.  With with_cross,
    the restriction to T_1 gives the theta components (the lower-filtration part).
    """
    n = chi.n
    if r != 0:
        raise ValueError("over Q_p only r = 0 occurs")
    o = shared_oracle(fp, n, K, V)
    C = fp.C
    W = W_beta_prime(n, beta)
    idx = {w: i for i, w in enumerate(W)}
    allW = all_elements(n)
    widx = {w: i for i, w in enumerate(allW)}
    keys = keys or default_keys(n)
    ts = t_samples(o)[:2]
    mats, cross, fails, zero = {}, {}, [], 0
    for key in keys:
        A = np.zeros((len(W), len(W)), dtype=np.int64)
        X = np.zeros((len(W), len(allW) * n), dtype=np.int64)
        for w in W:
            f = CocycleClass(o, {w: [(("eta", act(w.inverse(), beta)), 1)]})
            for w2 in allW:
                for gam in positive_roots(n):
                    if gam.height < beta.height:
                        continue
                    g = act(w2.inverse(), gam)
                    vals = set()
                    for y in _eta_samples(o, g):
                        v = apply_generator(o, chi, f, key, w2, o.u(g, y))
                        vals.add(C.mul(v, C.inv(_eta_read(o, g, y))))
                    if len(vals) != 1:
                        fails.append(f"{key} eta[{w}] at {w2},{gam}: not linear")
                        continue
                    c = vals.pop()
                    if gam == beta and w2 in idx:
                        A[idx[w], idx[w2]] = c
                    elif c:
                        fails.append(f"{key} eta[{w}] has a component at {w2},{gam}")
                    else:
                        zero += 1
                if f.order_mismatches:
                    fails.append(f"{key} eta[{w}] at {w2}: depends on the factorization order")
                    f.order_mismatches = 0
                if with_cross:
                    co = _theta_coeffs(o, chi, f, key, w2)
                    X[idx[w], widx[w2] * n:(widx[w2] + 1) * n] = co
                    if not _theta_linear(o, chi, f, key, w2, co, ts):
                        fails.append(f"{key} eta[{w}] on T_1 at {w2}: not linear")
        mats[key] = A
        if with_cross:
            cross[key] = X
    xl = [f"theta[{w}|{i},0]" for w in allW for i in range(1, n + 1)]
    return GradedTable([f"eta[{w}]" for w in W], mats, zero, fails, cross, xl)


def oracle_gr0_action(fp: FieldParams, chi: SmoothCharacter, K: int = 8, V: int = 4,
                      keys=None) -> GradedTable:
    """theta_i^w . T read on T_1; the values on root subgroups of the frame must vanish."""
    n = chi.n
    o = shared_oracle(fp, n, K, V)
    allW = all_elements(n)
    labels = [f"theta[{w}|{i},0]" for w in allW for i in range(1, n + 1)]
    pos = {l: k for k, l in enumerate(labels)}
    keys = keys or default_keys(n)
    ts = t_samples(o)[:2]
    mats, fails, zero = {}, [], 0
    for key in keys:
        A = np.zeros((len(labels), len(labels)), dtype=np.int64)
        for w in allW:
            for i in range(1, n + 1):
                f = CocycleClass(o, {w: [(("theta", i), 1)]})
                row = pos[f"theta[{w}|{i},0]"]
                for w2 in allW:
                    co = _theta_coeffs(o, chi, f, key, w2)
                    for j, c in enumerate(co, start=1):
                        A[row, pos[f"theta[{w2}|{j},0]"]] = c
                    if not _theta_linear(o, chi, f, key, w2, co, ts):
                        fails.append(f"{key} theta[{w}|{i}] at {w2}: not linear on T_1")
                    if f.order_mismatches:
                        fails.append(f"{key} theta[{w}|{i}] at {w2}: depends on the factorization order")
                        f.order_mismatches = 0
                    for g in all_roots(n):
                        if not act(w2, g).positive:
                            continue
                        y = 1 if g.positive else o.p
                        if apply_generator(o, chi, f, key, w2, o.u(g, y)):
                            fails.append(f"{key} theta[{w}|{i}] nonzero on U_{g} at {w2}")
                        else:
                            zero += 1
        mats[key] = A
    return GradedTable(labels, mats, zero, fails)


# ---- comparison with the formula layer ---------------------------------------

def _permuted(M, labels: list[str]) -> dict[str, np.ndarray]:
    """M's generator matrices re-indexed to the given label order."""
    pos = [M.labels.index(l) for l in labels]
    return {k: a[np.ix_(pos, pos)] for k, a in M.mats.items()}


def compare_tables(table: GradedTable, M) -> list[str]:
    if sorted(table.labels) != sorted(M.labels):
        return [f"label sets differ: {table.labels} vs {M.labels}"]
    mm = _permuted(M, table.labels)
    out = []
    for key, A in table.mats.items():
        B = mm[key]
        bad = np.argwhere(A != B)
        for i, j in bad[:5]:
            out.append(f"{key}: {table.labels[i]} -> {table.labels[j]}: oracle {A[i, j]}, formula {B[i, j]}")
    return out


def compare_cross(fp: FieldParams, chi: SmoothCharacter, beta: Root, table: GradedTable) -> list[str]:
    """The T_1 part of eta[w] . T against the Fil_1 cross term (beta simple)."""
    from .cohomology import build_fil1_piece
    C = fp.C
    P = build_fil1_piece(fp, chi, beta, 0)
    k = len(P.labels) // 2
    out = []
    for key, X in table.cross.items():
        if key not in P.mats:
            continue
        A = P.mats[key]
        for r, el in enumerate(table.labels):
            pr = P.labels.index(el)
            want = np.zeros(X.shape[1], dtype=np.int64)
            for c in range(k):
                coef = A[pr, c]
                if not coef:
                    continue
                w = P.labels[c][6:-1]
                # Theta = theta_j - theta_k in the frame of w
                jpos = table.cross_labels.index(f"theta[{w}|{beta.j},0]")
                kpos = table.cross_labels.index(f"theta[{w}|{beta.k},0]")
                want[jpos] = C.add(want[jpos], coef)
                want[kpos] = C.add(want[kpos], C.neg(coef))
            if not np.array_equal(want, X[r]):
                out.append(f"{key}: cross term of {el} differs")
    return out


@dataclass
class GradedReport:
    cases: list[dict]

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.cases)

    def to_json(self) -> dict:
        return {"ok": self.ok, "cases": self.cases}


def verify_graded(fp: FieldParams, n: int, chis=None, K: int = 8, V: int = 4) -> GradedReport:
    """Oracle tables against build_gr0, build_m_beta_r and the Fil_1 cross terms."""
    from .charfield import generic_character
    from .cohomology import build_gr0, build_m_beta_r
    chis = chis or [SmoothCharacter.trivial(fp, n), generic_character(fp, n, seed=1)]
    cases = []
    for chi in chis:
        t0 = oracle_gr0_action(fp, chi, K, V)
        g0 = build_gr0(fp, chi)
        lab0 = [l for l in g0.labels if l.endswith(",0]")]
        sub = g0.__class__(fp, g0.levi, lab0, _permuted(g0, lab0), g0.name)
        errs = t0.failures + compare_tables(t0, sub)
        cases.append({"chi": str(chi), "piece": "Gr0", "zero_checks": t0.zero_checks,
                      "ok": not errs, "errors": errs[:10]})
        for beta in positive_roots(n):
            tb = oracle_graded_action(fp, chi, beta, 0, K, V, with_cross=beta.height == 1)
            errs = tb.failures + compare_tables(tb, build_m_beta_r(fp, chi, beta, 0))
            if beta.height == 1:
                errs += compare_cross(fp, chi, beta, tb)
            cases.append({"chi": str(chi), "piece": f"m[{beta},0]", "zero_checks": tb.zero_checks,
                          "ok": not errs, "errors": errs[:10]})
    return GradedReport(cases)
