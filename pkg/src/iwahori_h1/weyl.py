"""
Type A root system and Weyl group combinatorics for GL_n.

Indices are 1-based throughout: the root alpha_{j,k} is ``Root(j, k)`` and the
simple reflection s_i swaps i and i+1.  A Weyl element is stored in one-line
notation, ``w.perm[j-1] == w(j)``, and acts on roots by relabelling indices.

>>> w = WeylElt.from_word(3, [2, 1])
>>> act(w, Root(1, 2))
Root(j=3, k=1)
>>> length(omega_bar_inv(3, 1)[0])
2
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from typing import Iterable, Sequence


@dataclass(frozen=True, order=True)
class Root:
    """alpha_{j,k}(diag(t)) = t_j / t_k."""
    j: int
    k: int

    def __post_init__(self):
        if self.j == self.k:
            raise ValueError("alpha_{j,j} is not a root")

    @property
    def positive(self) -> bool:
        return self.j < self.k

    @property
    def height(self) -> int:
        return self.k - self.j

    def __neg__(self) -> Root:
        return Root(self.k, self.j)

    def coroot(self, n: int) -> tuple[int, ...]:
        """Cocharacter exponents of alpha^vee."""
        v = [0] * n
        v[self.j - 1] = 1
        v[self.k - 1] = -1
        return tuple(v)

    def pairing(self, cochar: Sequence[int]) -> int:
        return cochar[self.j - 1] - cochar[self.k - 1]

    def __str__(self) -> str:
        return f"a{self.j},{self.k}"


@dataclass(frozen=True, order=True)
class AffineRoot:
    """(alpha, l), corresponding to the root subgroup u_alpha(varpi^l o)."""
    root: Root
    level: int

    def positive(self) -> bool:
        return self.level >= (0 if self.root.positive else 1)


def positive_roots(n: int) -> list[Root]:
    return [Root(j, k) for j in range(1, n + 1) for k in range(j + 1, n + 1)]


def all_roots(n: int) -> list[Root]:
    pos = positive_roots(n)
    return pos + [-a for a in pos]


def simple_root(i: int) -> Root:
    return Root(i, i + 1)


def highest_root(n: int) -> Root:
    return Root(1, n)


def affine_simple_roots(n: int) -> list[AffineRoot]:
    """Pi_aff: the finite simple roots at level 0, then (-alpha_0, 1)."""
    return [AffineRoot(simple_root(i), 0) for i in range(1, n)] + [
        AffineRoot(-highest_root(n), 1)]


@dataclass(frozen=True, order=True)
class WeylElt:
    perm: tuple[int, ...]

    @classmethod
    def identity(cls, n: int) -> WeylElt:
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def simple(cls, n: int, i: int) -> WeylElt:
        if not 1 <= i < n:
            raise ValueError(f"no simple reflection s_{i} for n={n}")
        p = list(range(1, n + 1))
        p[i - 1], p[i] = p[i], p[i - 1]
        return cls(tuple(p))

    @classmethod
    def from_word(cls, n: int, word: Iterable[int]) -> WeylElt:
        w = cls.identity(n)
        for i in word:
            w = w * cls.simple(n, i)
        return w

    @classmethod
    def reflection(cls, n: int, a: Root) -> WeylElt:
        p = list(range(1, n + 1))
        p[a.j - 1], p[a.k - 1] = a.k, a.j
        return cls(tuple(p))

    @property
    def n(self) -> int:
        return len(self.perm)

    def __call__(self, j: int) -> int:
        return self.perm[j - 1]

    def __mul__(self, other: WeylElt) -> WeylElt:
        return WeylElt(tuple(self.perm[x - 1] for x in other.perm))

    @lru_cache(maxsize=None)
    def inverse(self) -> WeylElt:
        inv = [0] * self.n
        for j, x in enumerate(self.perm, start=1):
            inv[x - 1] = j
        return WeylElt(tuple(inv))

    def __pow__(self, k: int) -> WeylElt:
        base = self if k >= 0 else self.inverse()
        out = WeylElt.identity(self.n)
        for _ in range(abs(k)):
            out = out * base
        return out

    def __str__(self) -> str:
        word = reduced_word(self)
        return "1" if not word else "s" + "s".join(map(str, word))


def act(w: WeylElt, a: Root) -> Root:
    return Root(w(a.j), w(a.k))


@lru_cache(maxsize=None)
def length(w: WeylElt) -> int:
    p = w.perm
    return sum(1 for a in range(len(p)) for b in range(a + 1, len(p)) if p[a] > p[b])


@lru_cache(maxsize=None)
def reduced_word(w: WeylElt) -> tuple[int, ...]:
    """Strip the smallest right descent until the identity is reached."""
    word: list[int] = []
    p = list(w.perm)
    while True:
        for i in range(1, len(p)):
            if p[i - 1] > p[i]:
                p[i - 1], p[i] = p[i], p[i - 1]
                word.append(i)
                break
        else:
            break
    return tuple(reversed(word))


def bruhat_leq(u: WeylElt, w: WeylElt) -> bool:
    """Subword property on the fixed reduced word of w."""
    target = u.perm
    n = w.n
    seen = {WeylElt.identity(n)}
    for i in reduced_word(w):
        s = WeylElt.simple(n, i)
        seen |= {x * s for x in seen}
    return WeylElt(target) in seen


@lru_cache(maxsize=None)
def all_elements(n: int) -> tuple[WeylElt, ...]:
    """W_0 sorted by (length, one-line notation)."""
    els = [WeylElt(tuple(p)) for p in permutations(range(1, n + 1))]
    return tuple(sorted(els, key=lambda w: (length(w), w.perm)))


def longest_element(n: int, simples: Iterable[int] = None) -> WeylElt:
    """Longest element of the parabolic subgroup generated by the given simples."""
    J = set(range(1, n)) if simples is None else set(simples)
    p = list(range(1, n + 1))
    for lo, hi in blocks_of(n, J):
        p[lo - 1:hi] = reversed(p[lo - 1:hi])
    return WeylElt(tuple(p))


def blocks_of(n: int, simples: Iterable[int]) -> list[tuple[int, int]]:
    """Index intervals [lo, hi] of the standard Levi with the given simple roots."""
    J = set(simples)
    out, lo = [], 1
    for i in range(1, n + 1):
        if i not in J:
            out.append((lo, i))
            lo = i + 1
    return out


def simples_of_blocks(blocks: Sequence[tuple[int, int]]) -> frozenset[int]:
    return frozenset(i for lo, hi in blocks for i in range(lo, hi))


def in_parabolic(w: WeylElt, simples: Iterable[int]) -> bool:
    return all(lo <= w(j) <= hi for lo, hi in blocks_of(w.n, simples)
               for j in range(lo, hi + 1))


def levi_positive_roots(n: int, simples: Iterable[int]) -> list[Root]:
    J = set(simples)
    return [a for a in positive_roots(n) if all(i in J for i in range(a.j, a.k))]


def parabolic_elements(n: int, simples: Iterable[int]) -> list[WeylElt]:
    J = frozenset(simples)
    return [w for w in all_elements(n) if in_parabolic(w, J)]


def min_coset_reps(n: int, simples: Iterable[int], side: str = "left") -> list[WeylElt]:
    """
    side="left": ^M W_0, the v with w = u v (u in W_M) of minimal length, i.e.
    v^{-1}(alpha) > 0 for alpha in Pi_M.  side="right": W_0^M, v(alpha) > 0.
    """
    J = sorted(set(simples))
    out = []
    for v in all_elements(n):
        x = v.inverse() if side == "left" else v
        if all(act(x, simple_root(i)).positive for i in J):
            out.append(v)
    return out


def omega_bar(n: int) -> WeylElt:
    """Image of omega in W_0: k -> k-1 cyclically."""
    return WeylElt(tuple((j - 2) % n + 1 for j in range(1, n + 1)))


def omega_bar_inv_word(n: int, i: int) -> tuple[int, ...]:
    """(s_i ... s_1)(s_{i+1} ... s_2) ... (s_{n-1} ... s_{n-i})."""
    if not 1 <= i <= n - 1:
        raise ValueError(f"i={i} out of range for n={n}")
    word: list[int] = []
    for c in range(n - i):
        word.extend(range(i + c, c, -1))
    return tuple(word)


def omega_bar_inv(n: int, i: int) -> tuple[WeylElt, tuple[int, ...]]:
    """omega_bar^{-i} with its displayed reduced word, both certified."""
    word = omega_bar_inv_word(n, i)
    w = WeylElt.from_word(n, word)
    if w != omega_bar(n) ** (-i) or not length(w) == len(word) == i * (n - i):
        raise AssertionError("omega_bar word is not reduced or wrong")
    J = set(range(1, n)) - {i}
    if w != longest_element(n, J) * longest_element(n):
        raise AssertionError("omega_bar^{-i} != w_(i),o w_o")
    return w, word


def violation_profile(w: WeylElt, i: int) -> list[int]:
    """Positions j (1-based) where w s_{a_1}...s_{a_j} drops in length."""
    _, word = omega_bar_inv(w.n, i)
    out, cur = [], w
    for j, a in enumerate(word, start=1):
        nxt = cur * WeylElt.simple(w.n, a)
        if length(nxt) < length(cur):
            out.append(j)
        cur = nxt
    return out


def stabilizer(elements: Iterable[WeylElt], a: Root) -> list[WeylElt]:
    return [w for w in elements if act(w, a) == a]


@dataclass(frozen=True)
class BetaData:
    """Combinatorics attached to beta = alpha_{m, m+a}."""
    n: int
    beta: Root

    @property
    def m(self) -> int:
        return self.beta.j

    @property
    def a(self) -> int:
        return self.beta.height

    @property
    def levi_simples(self) -> frozenset[int]:
        return frozenset(range(self.m, self.m + self.a))

    @property
    def blocks(self) -> list[tuple[int, int]]:
        return blocks_of(self.n, self.levi_simples)

    @property
    def w_beta_o(self) -> WeylElt:
        return longest_element(self.n, self.levi_simples)

    def levi_group(self) -> list[WeylElt]:
        return parabolic_elements(self.n, self.levi_simples)

    def stab(self) -> list[WeylElt]:
        return stabilizer(self.levi_group(), self.beta)

    def omega_levi(self) -> list[WeylElt]:
        """Omega_bar of M_beta: powers of the block cycle k -> k-1 on [m, m+a]."""
        m, a = self.m, self.a
        p = list(range(1, self.n + 1))
        for k in range(m, m + a + 1):
            p[k - 1] = m + a if k == m else k - 1
        c = WeylElt(tuple(p))
        return [c ** e for e in range(a + 1)]

    def left_reps(self) -> list[WeylElt]:
        return min_coset_reps(self.n, self.levi_simples, "left")


def is_in_W_beta_prime(w: WeylElt, beta: Root) -> bool:
    """Commutator condition: 1 + [w^{-1}beta<0] = [w^{-1}a_{m,j}<0] + [w^{-1}a_{j,m+a}<0]."""
    wi = w.inverse()
    neg = lambda r: 0 if act(wi, r).positive else 1
    m, top = beta.j, beta.k
    lhs = 1 + neg(beta)
    return all(lhs == neg(Root(m, j)) + neg(Root(j, top)) for j in range(m + 1, top))


@lru_cache(maxsize=None)
def W_beta_prime(n: int, beta: Root) -> tuple[WeylElt, ...]:
    """W'_beta by enumeration, sorted as in all_elements."""
    return tuple(w for w in all_elements(n) if is_in_W_beta_prime(w, beta))


def W_beta_prime_product(n: int, beta: Root) -> set[WeylElt]:
    """w_{beta,o} stab(beta) Omega_bar_{M_beta} ^beta W_0."""
    bd = BetaData(n, beta)
    wo = bd.w_beta_o
    return {wo * s * o * v for s in bd.stab() for o in bd.omega_levi() for v in bd.left_reps()}


def check_W_beta_prime(n: int, beta: Root) -> bool:
    from math import factorial
    enum = set(W_beta_prime(n, beta))
    return enum == W_beta_prime_product(n, beta) and len(enum) == factorial(n) // beta.height


def affine_length(perm: Sequence[int], vals: Sequence[int],
                  blocks: Sequence[tuple[int, int]] | None = None) -> int:
    """
    Length of the monomial element sending e_k to (unit * varpi^{vals[k]}) e_{perm[k]},
    counting positive affine roots inside the blocks made negative.  The root
    (alpha_{j,k}, l) goes to (alpha_{perm j, perm k}, l + vals_j - vals_k).
    """
    n = len(perm)
    if blocks is None:
        blocks = [(1, n)]
    total = 0
    for lo, hi in blocks:
        for j in range(lo, hi + 1):
            for k in range(lo, hi + 1):
                if j == k:
                    continue
                src = 0 if j < k else 1
                img = 0 if perm[j - 1] < perm[k - 1] else 1
                d = vals[j - 1] - vals[k - 1]
                total += max(0, img - d - src)
    return total


def affine_image(perm: Sequence[int], vals: Sequence[int], ar: AffineRoot) -> AffineRoot:
    j, k = ar.root.j, ar.root.k
    return AffineRoot(Root(perm[j - 1], perm[k - 1]),
                      ar.level + vals[j - 1] - vals[k - 1])
