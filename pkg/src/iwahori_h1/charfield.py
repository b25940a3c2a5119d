"""
Coefficient field C = F_{p^m} containing k_F = F_q, and smooth characters of
the diagonal torus.

Field elements are integer codes: the base-p digits of a code are the
coefficients of a polynomial in the fixed generator z of F_{p^m}.  Nonzero
elements are also addressed by their discrete logarithm with respect to a
fixed primitive element, which makes character evaluation additive.

A smooth character chi is given by exponents (e_1..e_n) mod q-1, so that
chi_i([x]) = x^{e_i} for x in k_F^x embedded in C, and values u_i = chi_i(varpi).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .chevalley import MonomialMatrix
from .weyl import Root, WeylElt


def _smallest_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Lowest coefficients c_0..c_{m-1} of the lexicographically smallest monic irreducible."""
    import sympy as sp
    x = sp.symbols("x")
    for code in range(p ** m):
        cs = [(code // p ** i) % p for i in range(m)]
        if m > 1 and cs[0] == 0:
            continue
        poly = sp.Poly([1] + cs[::-1], x, modulus=p)
        if poly.is_irreducible:
            return tuple(cs)
    raise AssertionError("no irreducible polynomial found")


@dataclass(frozen=True)
class CField:
    """F_{p^m} with log/exp tables and F_p multiplication matrices."""
    p: int
    m: int

    @cached_property
    def order(self) -> int:
        return self.p ** self.m

    @cached_property
    def modulus(self) -> tuple[int, ...]:
        return _smallest_irreducible(self.p, self.m)

    @cached_property
    def digits(self) -> np.ndarray:
        codes = np.arange(self.order)
        return np.stack([(codes // self.p ** i) % self.p for i in range(self.m)], axis=1)

    def _times_z(self, v: np.ndarray) -> np.ndarray:
        p, m = self.p, self.m
        top = v[m - 1]
        out = np.zeros(m, dtype=np.int64)
        out[1:] = v[:-1]
        out = (out - top * np.array(self.modulus)) % p
        return out

    @cached_property
    def _powers_of_z(self) -> np.ndarray:
        """Row i holds z^i reduced, for i < 2m."""
        rows = [np.eye(self.m, dtype=np.int64)[0]]
        for _ in range(2 * self.m):
            rows.append(self._times_z(rows[-1]))
        return np.array(rows)

    def encode(self, v) -> int:
        return int(sum(int(c) * self.p ** i for i, c in enumerate(v)))

    def mul_slow(self, a: int, b: int) -> int:
        da, db = self.digits[a], self.digits[b]
        acc = np.zeros(self.m, dtype=np.int64)
        for i in range(self.m):
            for j in range(self.m):
                acc = acc + da[i] * db[j] * self._powers_of_z[i + j]
        return self.encode(acc % self.p)

    @cached_property
    def _log_tables(self) -> tuple[np.ndarray, np.ndarray, int]:
        Q = self.order
        for cand in range(2, Q) if self.m > 1 else range(1, Q):
            exp = np.zeros(Q - 1, dtype=np.int64)
            x = 1
            ok = True
            for k in range(Q - 1):
                if k > 0 and x == 1:
                    ok = False
                    break
                exp[k] = x
                x = self.mul_slow(x, cand)
            if ok and x == 1 and len(set(exp.tolist())) == Q - 1:
                log = np.full(Q, -1, dtype=np.int64)
                log[exp] = np.arange(Q - 1)
                return exp, log, cand
        raise AssertionError("no primitive element")

    @property
    def gen(self) -> int:
        """The fixed primitive element of C^x."""
        return self._log_tables[2]

    def exp(self, k: int) -> int:
        return int(self._log_tables[0][k % (self.order - 1)])

    def log(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("log of 0")
        return int(self._log_tables[1][a])

    def add(self, a: int, b: int) -> int:
        return self.encode((self.digits[a] + self.digits[b]) % self.p)

    def neg(self, a: int) -> int:
        return self.encode((-self.digits[a]) % self.p)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp(self.log(a) + self.log(b))

    def inv(self, a: int) -> int:
        return self.exp(-self.log(a))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 0 if e > 0 else 1
        return self.exp(self.log(a) * e)

    def from_int(self, k: int) -> int:
        return k % self.p

    @cached_property
    def mult_mats(self) -> np.ndarray:
        """mult_mats[c] is the m x m F_p matrix of x -> x c on row vectors of digits."""
        Q, m = self.order, self.m
        out = np.zeros((Q, m, m), dtype=np.int64)
        basis_codes = [self.p ** i for i in range(m)]
        for c in range(Q):
            for i, b in enumerate(basis_codes):
                out[c, i] = self.digits[self.mul(b, c)]
        return out

    @cached_property
    def add_t(self) -> np.ndarray:
        D = self.digits
        s = (D[:, None, :] + D[None, :, :]) % self.p
        return (s * (self.p ** np.arange(self.m))).sum(axis=2).astype(np.int64)

    @cached_property
    def neg_t(self) -> np.ndarray:
        D = (-self.digits) % self.p
        return (D * (self.p ** np.arange(self.m))).sum(axis=1).astype(np.int64)

    @cached_property
    def mul_t(self) -> np.ndarray:
        Q = self.order
        exp, log, _ = self._log_tables
        L = log[1:]
        t = np.zeros((Q, Q), dtype=np.int64)
        t[1:, 1:] = exp[(L[:, None] + L[None, :]) % (Q - 1)]
        return t

    @cached_property
    def inv_t(self) -> np.ndarray:
        Q = self.order
        exp, log, _ = self._log_tables
        t = np.zeros(Q, dtype=np.int64)
        t[1:] = exp[(-log[1:]) % (Q - 1)]
        return t

    def frobenius(self, a: int, r: int = 1) -> int:
        return self.pow(a, self.p ** r)

    def __str__(self) -> str:
        return f"F_{self.p}^{self.m}"


@dataclass(frozen=True)
class FieldParams:
    p: int
    f: int = 1
    e: int = 1
    zeta_p: bool = False
    m: int | None = None

    def __post_init__(self):
        if self.p < 3 or any(self.p % d == 0 for d in range(2, int(self.p ** 0.5) + 1)):
            raise ValueError("p must be an odd prime")
        if self.f < 1 or self.e < 1:
            raise ValueError("e and f must be positive")
        if self.deg == 1 and self.zeta_p:
            raise ValueError("zeta_p is not in Q_p for odd p")
        if self.m is not None and self.m % self.f:
            raise ValueError("f must divide m")

    @property
    def deg(self) -> int:
        return self.e * self.f

    @property
    def q(self) -> int:
        return self.p ** self.f

    @property
    def is_Qp(self) -> bool:
        return self.deg == 1

    @property
    def coeff_degree(self) -> int:
        return self.m if self.m is not None else 2 * self.f

    @cached_property
    def C(self) -> CField:
        return CField(self.p, self.coeff_degree)

    def d(self, n: int) -> int:
        """dim Hom(T_1, C) = n (deg + [zeta_p in F])."""
        return n * (self.deg + int(self.zeta_p))

    @property
    def gq_log(self) -> int:
        """log of the generator of k_F^x inside C^x."""
        return (self.C.order - 1) // (self.q - 1)

    def teich_exponent(self, phase: Fraction) -> int:
        """a with [g]^a = the root of unity of the given phase."""
        a = Fraction(phase) * (self.q - 1)
        if a.denominator != 1:
            raise ValueError(f"phase {phase} is not a (q-1)-th root of unity")
        return int(a) % (self.q - 1)

    def kF_elements(self) -> list[int]:
        """Codes in C of k_F^x, listed as [g]^0, [g]^1, ..."""
        return [self.C.exp(self.gq_log * k) for k in range(self.q - 1)]


@dataclass(frozen=True)
class SmoothCharacter:
    fp: FieldParams
    exps: tuple[int, ...]
    uvals: tuple[int, ...]

    def __post_init__(self):
        qm1 = self.fp.q - 1
        object.__setattr__(self, "exps", tuple(int(x) % qm1 for x in self.exps))
        if len(self.exps) != len(self.uvals) or any(u == 0 for u in self.uvals):
            raise ValueError("bad character data")

    @classmethod
    def trivial(cls, fp: FieldParams, n: int) -> SmoothCharacter:
        return cls(fp, (0,) * n, (1,) * n)

    @property
    def n(self) -> int:
        return len(self.exps)

    def log_eval(self, t: MonomialMatrix) -> int:
        C = self.fp.C
        total = 0
        for (ph, v), e, u in zip(t.diag_entries(), self.exps, self.uvals):
            total += self.fp.teich_exponent(ph) * e * self.fp.gq_log + v * C.log(u)
        return total % (C.order - 1)

    def eval(self, t: MonomialMatrix) -> int:
        return self.fp.C.exp(self.log_eval(t))

    def eval_inv(self, t: MonomialMatrix) -> int:
        return self.fp.C.exp(-self.log_eval(t))

    def twist(self, w: WeylElt) -> SmoothCharacter:
        """chi^w(t) = chi(w^ t w^^{-1}): slot k of t lands in slot w(k)."""
        return SmoothCharacter(self.fp, tuple(self.exps[w(k) - 1] for k in range(1, self.n + 1)),
                               tuple(self.uvals[w(k) - 1] for k in range(1, self.n + 1)))

    def mul_root(self, b: Root, k: int) -> SmoothCharacter:
        """chi * beta_bar^k."""
        ex = list(self.exps)
        ex[b.j - 1] += k
        ex[b.k - 1] -= k
        return SmoothCharacter(self.fp, tuple(ex), self.uvals)

    def coroot_exponent(self, b: Root) -> int:
        """a with chi o b^vee([x]) = x^a."""
        return (self.exps[b.j - 1] - self.exps[b.k - 1]) % (self.fp.q - 1)

    def delta_coroot(self, b: Root) -> int:
        return int(self.coroot_exponent(b) == 0)

    def restrict_units_equal(self, other: SmoothCharacter) -> bool:
        return self.exps == other.exps

    def __str__(self) -> str:
        C = self.fp.C
        u = ",".join(f"g^{C.log(x)}" for x in self.uvals)
        return f"exps:[{','.join(map(str, self.exps))}];uvals:[{u}]"


def gauss_sum_delta(fp: FieldParams, a: int) -> int:
    """sum over x in k_F^x of x^a, as a code in C: -1 if a = 0 mod q-1, else 0."""
    C = fp.C
    return C.neg(1) if a % (fp.q - 1) == 0 else 0


def gauss_sum_brute(fp: FieldParams, a: int) -> int:
    C = fp.C
    acc = 0
    for x in fp.kF_elements():
        acc = C.add(acc, C.pow(x, a))
    return acc


_CHI_RE = re.compile(r"^\s*exps:\[([^\]]*)\]\s*;\s*uvals:\[([^\]]*)\]\s*$")


def parse_character(text: str, fp: FieldParams, n: int) -> SmoothCharacter:
    """Parse ``exps:[a1,...];uvals:[g^k1,...]`` (a bare integer k in uvals means g^k)."""
    mt = _CHI_RE.match(text)
    if not mt:
        raise ValueError(f"cannot parse character {text!r}")
    exps = [int(x) for x in mt.group(1).split(",") if x.strip()]
    uv = []
    for tok in mt.group(2).split(","):
        tok = tok.strip()
        if not tok:
            continue
        k = tok[2:] if tok.startswith("g^") else tok
        uv.append(fp.C.exp(int(k)))
    if len(exps) != n or len(uv) != n:
        raise ValueError(f"character needs {n} exps and {n} uvals")
    return SmoothCharacter(fp, tuple(exps), tuple(uv))


def generic_character(fp: FieldParams, n: int, seed: int = 0) -> SmoothCharacter:
    """Deterministic character with distinct, well-separated data across slots."""
    qm1 = fp.q - 1
    exps = tuple((1 + seed + 2 * i * i + i) % qm1 for i in range(n))
    uvals = tuple(fp.C.exp(3 + seed + 5 * i * i + 7 * i) for i in range(n))
    return SmoothCharacter(fp, exps, uvals)
