"""
The Hecke modules carried by the first pro-p Iwahori cohomology of a mod-p
principal series of GL_n(F), built from the height filtration:

    Gr_0  = Ind(chi)^{+d}                    (basis theta^w)
    Gr_a  = sum over ht(beta) = a, 0 <= r < f of m_{beta,r}   (basis eta^w, w in W'_beta)

together with the two-dimensional H_{M_beta}-modules n_{F,beta,r}, the induced
module Ind(n) and its isomorphism onto m_{beta,r}, the right adjoint to
induction from M_beta with its filtration Fil', the counit, and the extension
Fil_1 of Gr_1 by Gr_0.

All coefficients are evaluated from lifts and characters; nothing is hand
simplified.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import numpy as np

from . import linalg as la
from .charfield import FieldParams, SmoothCharacter
from .chevalley import (MonomialMatrix, coroot_elt, d_const, d_w, frak_s, lift, omega)
from .heckemod import (HModule, Levi, SplitResult, build_module, find_isomorphism,
                       find_splitting, is_equivariant, is_supersingular, left_adjoint_dim,
                       right_adjoint)
from .weyl import (BetaData, Root, WeylElt, W_beta_prime, act, all_elements, bruhat_leq,
                   highest_root, length, parabolic_elements, positive_roots, reduced_word,
                   simple_root)

HALF = Fraction(1, 2)


def _sorted(ws) -> list[WeylElt]:
    return sorted(ws, key=lambda w: (length(w), w.perm))


def _conj(w: WeylElt, t: MonomialMatrix) -> MonomialMatrix:
    return lift(w) * t * lift(w).inverse()


def _ker_elts(fp: FieldParams, n: int, b: Root) -> list[MonomialMatrix]:
    """b^vee([x]) for x in k_F^x."""
    return [coroot_elt(n, b, Fraction(k, fp.q - 1)) for k in range(fp.q - 1)]


# ---- Ind(chi) and Gr_0 ------------------------------------------------------

def build_ind_chi(fp: FieldParams, chi: SmoothCharacter, levi: Levi | None = None,
                  tag: str = "theta") -> HModule:
    """I_1-invariants of Ind_B^M(chi) on the basis f_w, w in W_{M,0}."""
    n = chi.n
    levi = levi or Levi.full(n)
    F = fp.C
    els = _sorted(parabolic_elements(n, levi.simples))
    idx = {w: i for i, w in enumerate(els)}
    d = len(els)
    mats = {}
    for key, ar in levi.affine_roots().items():
        g = levi.reflections()[key]
        a = ar.root
        sa = WeylElt.reflection(n, a)
        A = la.zeros(d, d)
        for w in els:
            wa = act(w, a)
            if wa.positive:
                A[idx[w], idx[w * sa]] = chi.eval(lift(w * sa) * g.inverse() * lift(w).inverse())
            elif chi.delta_coroot(wa):
                A[idx[w], idx[w]] = F.neg(1)
        mats[key] = A
    for key, om in levi.omegas().items():
        ob = om.weyl
        A = la.zeros(d, d)
        for w in els:
            A[idx[w], idx[w * ob]] = chi.eval(lift(w * ob) * om.inverse() * lift(w).inverse())
        mats[key] = A
    for i in range(1, n + 1):
        t = levi.torus_gen(i, fp)
        mats[f"t{i}"] = np.diag([chi.eval_inv(_conj(w, t)) for w in els]).astype(np.int64)
    labels = [f"{tag}[{w}]" for w in els]
    return build_module(fp, levi, labels, mats, f"Ind[{levi}]({chi})", {"chi": str(chi)})


def gr0_copies(fp: FieldParams, n: int) -> list[tuple[int, int]]:
    """Index (slot i, c) of a basis of Hom(T_1, C); c < f are the Frobenius twists x -> x^{p^c}."""
    return [(i, c) for i in range(1, n + 1) for c in range(fp.deg + int(fp.zeta_p))]


def build_gr0(fp: FieldParams, chi: SmoothCharacter) -> HModule:
    """Gr_0 = Ind(chi) tensor Hom(T_1, C), as d block-diagonal copies."""
    ind = build_ind_chi(fp, chi)
    copies = gr0_copies(fp, chi.n)
    k = len(copies)
    mats = {key: np.kron(np.eye(k, dtype=np.int64), a) for key, a in ind.mats.items()}
    labels = [f"theta[{w[6:-1]}|{i},{c}]" for i, c in copies for w in ind.labels]
    return HModule(fp, ind.levi, labels, mats, f"Gr0({chi})",
                   {"chi": str(chi), "d": k})


# ---- m_{beta,r} ------------------------------------------------------------

def chi_beta(fp: FieldParams, chi: SmoothCharacter, beta: Root, r: int) -> SmoothCharacter:
    """chi * beta_bar^{-p^r}."""
    return chi.mul_root(beta, -fp.p ** r)


def omega_split(n: int) -> tuple[MonomialMatrix, MonomialMatrix]:
    """omega = t0 * lambda(varpi) * lift(omega_bar) with t0 in T_0."""
    om = omega(n)
    rest = om * lift(om.weyl).inverse()
    t0 = MonomialMatrix.diag(phases=[p for p, _ in rest.diag_entries()])
    lam = MonomialMatrix.diag(vals=[v for _, v in rest.diag_entries()])
    return t0, lam * lift(om.weyl)


def build_m_beta_r(fp: FieldParams, chi: SmoothCharacter, beta: Root, r: int) -> HModule:
    n = chi.n
    F = fp.C
    lv = Levi.full(n)
    W = W_beta_prime(n, beta)
    idx = {w: i for i, w in enumerate(W)}
    d = len(W)
    cb = chi_beta(fp, chi, beta, r)
    mats = {}
    for key, ar in lv.affine_roots().items():
        g = lv.reflections()[key]
        a = ar.root
        sa = WeylElt.reflection(n, a)
        A = la.zeros(d, d)
        for w in W:
            wa = act(w, a)
            if not wa.positive and cb.delta_coroot(wa):
                A[idx[w], idx[w]] = F.neg(1)
            coef = 0
            if wa.positive and wa != beta:
                coef += d_const(a, act(sa, act(w.inverse(), beta)), n)
            if wa == -beta and fp.is_Qp:
                coef -= 1
            if coef:
                u = w * sa
                if u not in idx:
                    raise AssertionError(f"{u} not in W'_beta")
                z = chi.eval(lift(u) * g.inverse() * lift(w).inverse())
                A[idx[w], idx[u]] = F.add(A[idx[w], idx[u]], F.mul(z, F.from_int(coef)))
        mats[key] = A
    t0, om1 = omega_split(n)
    ob = om1.weyl
    A = la.zeros(d, d)
    for w in W:
        u = w * ob
        z = F.mul(cb.eval_inv(_conj(w, t0)),
                  chi.eval(lift(u) * om1.inverse() * lift(w).inverse()))
        gamma = act(ob.inverse(), act(w.inverse(), beta))
        A[idx[w], idx[u]] = F.mul(z, F.from_int(d_w(ob, gamma)))
    mats["o0"] = A
    for i in range(1, n + 1):
        t = lv.torus_gen(i, fp)
        mats[f"t{i}"] = np.diag([cb.eval_inv(_conj(w, t)) for w in W]).astype(np.int64)
    labels = [f"eta[{w}]" for w in W]
    meta = {"chi": str(chi), "beta": str(beta), "beta_jk": (beta.j, beta.k), "r": r}
    return build_module(fp, lv, labels, mats, f"m[{beta},{r}]", meta)


def m_index(M: HModule) -> dict[WeylElt, int]:
    """Basis position of eta^w in a module built by build_m_beta_r."""
    W = W_beta_prime(M.n, _beta_of(M))
    return {w: i for i, w in enumerate(W)}


def _beta_of(M: HModule) -> Root:
    j, k = M.meta["beta_jk"]
    return Root(j, k)


# ---- n_{F,beta,r} ----------------------------------------------------------

def build_n_F_beta_r(fp: FieldParams, chi: SmoothCharacter, beta: Root, r: int) -> HModule:
    """The two-dimensional H_{M_beta}-module on v1, v2 (beta simple)."""
    if beta.height != 1 or not beta.positive:
        raise ValueError("beta must be a simple root")
    n = chi.n
    F = fp.C
    lv = Levi.from_simples(n, [beta.j])
    bi = lv.block_of(beta.j)
    cb = chi_beta(fp, chi, beta, r)
    cs = chi.twist(WeylElt.reflection(n, beta)).mul_root(beta, fp.p ** r)
    dq = int(fp.is_Qp)
    minus = F.neg(1)

    def tor(t: MonomialMatrix) -> np.ndarray:
        return np.diag([cb.eval_inv(t), cs.eval_inv(t)]).astype(np.int64)

    mats = {}
    S = la.zeros(2, 2)
    S[1, 0] = F.neg(F.mul(chi.eval(coroot_elt(n, beta, HALF)), dq))
    S[1, 1] = F.neg(cb.delta_coroot(beta))
    mats[f"s{beta.j}"] = S
    for i in range(1, n + 1):
        mats[f"t{i}"] = tor(lv.torus_gen(i, fp))
    for key, om in lv.omegas().items():
        if int(key[1:]) != bi:
            mats[key] = tor(om)
            continue
        t = om * frak_s(n, beta).inverse()
        A = la.zeros(2, 2)
        A[0, 1] = F.mul(minus, cb.eval_inv(t))
        A[1, 0] = F.mul(minus, cs.eval_inv(t * coroot_elt(n, beta, HALF)))
        mats[key] = A
    # the block's affine reflection is omega-conjugate to t' s_beta
    ob = lv.omegas()[f"o{bi}"]
    y = ob.inverse() * lv.reflections()[f"a{bi}"] * ob
    tp = y * frak_s(n, beta).inverse()
    assert tp.is_diagonal and not any(tp.vals)
    O = mats[f"o{bi}"]
    mats[f"a{bi}"] = la.mat_chain(F, [O, tor(tp), S, la.inverse(F, O)], 2)
    meta = {"chi": str(chi), "beta": str(beta), "r": r}
    return build_module(fp, lv, ["v1", "v2"], mats, f"n[{beta},{r}]", meta)


def invariant_lines(M: HModule) -> list[np.ndarray]:
    """All one-dimensional submodules of a two-dimensional module (brute force over C)."""
    if M.dim != 2:
        raise ValueError("dimension 2 only")
    F = M.F
    cands = [np.array([[0, 1]])] + [np.array([[1, x]]) for x in range(F.order)]
    out = []
    for v in cands:
        if all(la.in_span(F, v, la.matmul(F, v, a)) for a in M.mats.values()):
            out.append(v)
    return out


@dataclass
class NClassification:
    kind: str
    supersingular: bool
    detail: dict = field(default_factory=dict)


def classify_n(fp: FieldParams, chi: SmoothCharacter, beta: Root, r: int,
               nmod: HModule | None = None) -> NClassification:
    """
    Decide induced / extension / supersingular from the character data, then
    confirm it on the module itself.
    """
    n = chi.n
    nmod = nmod or build_n_F_beta_r(fp, chi, beta, r)
    sb = WeylElt.reflection(n, beta)
    psi = chi.twist(sb).mul_root(beta, 1)
    # (chi^{s_beta} beta_bar) o beta^vee on all of F^x: unit exponent and value at varpi
    trivial = psi.delta_coroot(beta) and psi.eval(coroot_elt(n, beta, 0, 1)) == 1
    ss = is_supersingular(nmod)
    lines = invariant_lines(nmod)
    if not fp.is_Qp:
        kind = "supersingular"
        # semisimple: simple (no line) or a sum of two characters
        ok = ss and len(lines) != 1
    elif not trivial:
        kind = "induced"
        ind = build_ind_chi(fp, psi, nmod.levi)
        ok = (not ss) and find_isomorphism(ind, nmod) is not None
    else:
        kind = "extension"
        ok = (not ss) and len(lines) == 1 and _ext_sub_sign(nmod, lines[0])
    if not ok:
        raise AssertionError(f"n[{beta},{r}] does not match its predicted type {kind}")
    return NClassification(kind, ss, {"invariant_lines": len(lines)})


def _ext_sub_sign(M: HModule, line: np.ndarray) -> bool:
    """The sub line carries T_s = -1 on every affine reflection and the quotient T_s = 0."""
    F = M.F
    comp = la.quotient_basis(F, line, 2)
    basis = np.vstack([line, comp])
    for key in M.levi.affine_roots():
        a = la.solve_left(F, basis, la.matmul(F, basis, M.mats[key]))
        if a[0, 0] != F.neg(1) or a[1, 1] != 0:
            return False
    return True


# ---- Ind(n) and the isomorphism onto m_{beta,r} -----------------------------

def build_ind_n(nmod: HModule, beta: Root) -> tuple[HModule, list[WeylElt]]:
    """
    n tensor_{H_M^+} H on the basis v_i (x) T_w, w in ^beta W_0, with the action
    of each generator of H reduced to an element of H_{M_beta} acting on n.
    """
    fp = nmod.fp
    F = fp.C
    n = nmod.n
    reps = _sorted(BetaData(n, beta).left_reps())
    ridx = {w: k for k, w in enumerate(reps)}
    d = 2 * len(reps)
    lv = Levi.full(n)
    sb = WeylElt.reflection(n, beta)
    fb = frak_s(n, beta)
    a0 = highest_root(n)
    sa0 = WeylElt.reflection(n, a0)

    def put(A, w, u, block):
        i, j = 2 * ridx[w], 2 * ridx[u]
        A[i:i + 2, j:j + 2] = F.add_t[A[i:i + 2, j:j + 2], block]

    def csum(root: Root) -> np.ndarray:
        out = la.zeros(2, 2)
        for t in _ker_elts(fp, n, root):
            out = la.add(F, out, nmod.torus(t))
        return out

    mats = {}
    for key, ar in lv.affine_roots().items():
        A = la.zeros(d, d)
        g = lv.reflections()[key]
        if key.startswith("s"):
            a = ar.root
            sa = WeylElt.reflection(n, a)
            for w in reps:
                wa = act(w, a)
                if wa.positive and wa != beta:
                    put(A, w, w * sa, np.eye(2, dtype=np.int64))
                elif wa == beta:
                    put(A, w, w, nmod.mats[f"s{beta.j}"])
                else:
                    put(A, w, w, csum(wa))
        else:
            for w in reps:
                wa0 = act(w, a0)
                if wa0.positive and wa0 != beta:
                    put(A, w, w, csum(wa0))
                elif wa0 == beta:
                    put(A, w, w, nmod.T(lift(w) * g * lift(w).inverse()))
                elif act(sa0, act(w.inverse(), beta)).positive:
                    u = w * sa0
                    put(A, w, u, nmod.T(lift(w) * g * lift(u).inverse()))
                else:
                    u = sb * w * sa0
                    put(A, w, u, nmod.T(lift(w) * g * lift(w * sa0).inverse() * fb))
        mats[key] = A
    om = omega(n)
    ob = om.weyl
    A = la.zeros(d, d)
    for w in reps:
        u0 = w * ob
        if act(u0.inverse(), beta).positive:
            put(A, w, u0, nmod.T(lift(w) * om * lift(u0).inverse()))
        else:
            put(A, w, sb * u0, nmod.T(lift(w) * om * lift(u0).inverse() * fb))
    mats["o0"] = A
    for i in range(1, n + 1):
        t = lv.torus_gen(i, fp)
        A = la.zeros(d, d)
        for w in reps:
            put(A, w, w, nmod.torus(_conj(w, t)))
        mats[f"t{i}"] = A
    labels = [f"v{i}@{w}" for w in reps for i in (1, 2)]
    return build_module(fp, lv, labels, mats, f"Ind({nmod.name})", dict(nmod.meta)), reps


def frak_f_matrix(m: HModule, reps: list[WeylElt], beta: Root) -> np.ndarray:
    """v1 (x) T_w -> d_{w,w^-1 beta} eta^w and v2 (x) T_w -> d_{w,w^-1 beta} eta^{s_beta w}."""
    F = m.F
    idx = m_index(m)
    sb = WeylElt.reflection(m.n, beta)
    X = la.zeros(2 * len(reps), m.dim)
    for k, w in enumerate(reps):
        c = F.from_int(d_w(w, act(w.inverse(), beta)))
        X[2 * k, idx[w]] = c
        X[2 * k + 1, idx[sb * w]] = c
    return X


@dataclass
class AppendixResult:
    ok: bool
    failures: list[str]
    matrix: np.ndarray
    dim: int


def appendix_isomorphism_check(fp: FieldParams, chi: SmoothCharacter, beta: Root, r: int) -> AppendixResult:
    nmod = build_n_F_beta_r(fp, chi, beta, r)
    ind, reps = build_ind_n(nmod, beta)
    m = build_m_beta_r(fp, chi, beta, r)
    X = frak_f_matrix(m, reps, beta)
    bad = is_equivariant(ind, m, X)
    full = la.rank(fp.C, X) == m.dim == ind.dim
    return AppendixResult(not bad and full, bad if full else bad + ["rank"], X, ind.dim)


# ---- right adjoint to M_beta, Fil' and the counit ----------------------------

@dataclass
class RightAdjointBeta:
    beta: Root
    r: int
    module: HModule
    m: HModule
    basis_elements: list[WeylElt]
    stab: list[WeylElt]
    fil: dict[WeylElt, np.ndarray]
    graded: dict[WeylElt, HModule]
    checks: dict[str, bool]

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def cyclic_span(M: HModule, v: np.ndarray) -> np.ndarray:
    F = M.F
    span = la.row_space(F, np.atleast_2d(v))
    while True:
        imgs = [la.matmul(F, span, a) for a in M.mats.values()]
        new = la.row_space(F, np.vstack([span] + imgs))
        if new.shape[0] == span.shape[0]:
            return new
        span = new


def is_generic_for(fp: FieldParams, chi: SmoothCharacter, beta: Root, r: int) -> bool:
    """All torus characters t0 -> (chi beta_bar^{-p^r})(w t0 w^{-1})^{-1} on R pairwise distinct."""
    bd = BetaData(chi.n, beta)
    cb = chi_beta(fp, chi, beta, r)
    seen = set()
    lv = Levi.full(chi.n)
    for s in bd.stab():
        for o in bd.omega_levi():
            w = bd.w_beta_o * s * o
            key = tuple(cb.eval_inv(_conj(w, lv.torus_gen(i, fp))) for i in range(1, chi.n + 1))
            if key in seen:
                return False
            seen.add(key)
    return True


def right_adjoint_beta(fp: FieldParams, chi: SmoothCharacter, beta: Root, r: int,
                       m: HModule | None = None) -> RightAdjointBeta:
    n = chi.n
    F = fp.C
    if beta.height < 2:
        raise ValueError("height at least 2")
    m = m or build_m_beta_r(fp, chi, beta, r)
    bd = BetaData(n, beta)
    J = bd.levi_simples
    R = right_adjoint(m, J)
    idx = m_index(m)
    stab = _sorted(bd.stab())
    oms = bd.omega_levi()
    expect = [bd.w_beta_o * s * o for s in stab for o in oms]
    U = la.zeros(len(expect), m.dim)
    for k, w in enumerate(expect):
        U[k, idx[w]] = 1
    checks = {}
    checks["basis"] = R.dim == len(expect) and la.rank(F, np.vstack([R.basis, U])) == R.dim
    a = beta.height
    checks["dim"] = R.dim == factorial(a + 1) // a
    Rm = R.module
    # coordinates in R: R.basis is the rref of unit vectors, so row k <-> its pivot
    pos = {int(np.nonzero(row)[0][0]): k for k, row in enumerate(R.basis)}
    inv_idx = {i: w for w, i in idx.items()}

    def rvec(ws) -> np.ndarray:
        out = la.zeros(len(ws), R.dim)
        for k, w in enumerate(ws):
            out[k, pos[idx[w]]] = 1
        return out

    fil = {}
    for s in stab:
        fil[s] = rvec([bd.w_beta_o * s2 * o for s2 in stab if bruhat_leq(s2, s) for o in oms])
    stable = all(la.in_span(F, V, la.matmul(F, V, A)) for V in fil.values() for A in Rm.mats.values())
    checks["fil_stable"] = stable
    graded = {}
    gen = is_generic_for(fp, chi, beta, r)
    cb = chi_beta(fp, chi, beta, r)
    for s in stab:
        sub = Rm.submodule(fil[s])
        lower = [bd.w_beta_o * s2 * o for s2 in stab if bruhat_leq(s2, s) and s2 != s for o in oms]
        top = [bd.w_beta_o * s * o for o in oms]
        allw = [bd.w_beta_o * s2 * o for s2 in stab if bruhat_leq(s2, s) for o in oms]
        sidx = {w: k for k, w in enumerate(allw)}
        low = la.zeros(len(lower), len(allw))
        for k, w in enumerate(lower):
            low[k, sidx[w]] = 1
        gr, _ = sub.quotient(low, name=f"Gr'[{s}]")
        graded[s] = gr
        checks[f"gr[{s}].dim"] = gr.dim == a + 1
        checks[f"gr[{s}].cyclic"] = cyclic_span(gr, np.eye(gr.dim, dtype=np.int64)[0]).shape[0] == gr.dim
        checks[f"gr[{s}].supersingular"] = is_supersingular(gr, all_levis=True)
        tor_ok = True
        for k, w in enumerate(top):
            for i in range(1, n + 1):
                want = cb.eval_inv(_conj(w, gr.levi.torus_gen(i, fp)))
                tor_ok &= gr.mats[f"t{i}"][k, k] == want
        checks[f"gr[{s}].torus"] = bool(tor_ok)
        if gen:
            checks[f"gr[{s}].simple"] = all(
                cyclic_span(gr, e).shape[0] == gr.dim for e in np.eye(gr.dim, dtype=np.int64))
    checks["supersingular"] = is_supersingular(Rm, all_levis=True)
    basis_w = [inv_idx[int(np.nonzero(row)[0][0])] for row in R.basis]
    return RightAdjointBeta(beta, r, Rm, m, basis_w, stab, fil, graded, checks)


def in_levi_i(beta: Root, i: int) -> bool:
    """beta is a root of M_(i) = GL_i x GL_{n-i}."""
    return beta.k <= i or beta.j > i


def rightadj_check(m: HModule, i: int) -> bool:
    """R to M_(i) is span{eta^u : u in W'_beta cap W_(i),0} when beta is in M_(i), else 0."""
    n = m.n
    beta = _beta_of(m)
    J = frozenset(range(1, n)) - {i}
    R = right_adjoint(m, J)
    if not in_levi_i(beta, i):
        return R.dim == 0
    idx = m_index(m)
    Wi = set(parabolic_elements(n, J))
    us = [w for w in idx if w in Wi]
    U = la.zeros(len(us), m.dim)
    for k, w in enumerate(us):
        U[k, idx[w]] = 1
    return R.dim == len(us) > 0 and la.rank(m.F, np.vstack([R.basis, U])) == R.dim


def reorder(M: HModule, order: list[int]) -> HModule:
    mats = {k: a[np.ix_(order, order)] for k, a in M.mats.items()}
    return HModule(M.fp, M.levi, [M.labels[i] for i in order], mats, M.name, dict(M.meta))


def fil_prime_splitting(rb: RightAdjointBeta) -> SplitResult:
    """Split test for 0 -> Fil'_{min} -> R -> R/Fil'_{min} -> 0 (the Bruhat-minimal piece)."""
    Rm = rb.module
    s0 = rb.stab[0]
    sub_cols = [int(np.nonzero(row)[0][0]) for row in rb.fil[s0]]
    rest = [i for i in range(Rm.dim) if i not in sub_cols]
    return find_splitting(reorder(Rm, sub_cols + rest), len(sub_cols))


def regular_on_units(chi: SmoothCharacter) -> bool:
    """w(chi)|_{T_0} != chi|_{T_0} for every w != 1, i.e. the unit exponents are distinct."""
    return len(set(chi.exps)) == chi.n


def gl4_example_check(fp: FieldParams, chi: SmoothCharacter) -> dict[str, bool]:
    """The GL_4 example: W'_beta, the two graded pieces, the T_1 table, non-splitting."""
    n = 4
    beta = Root(1, 4)
    if chi.n != n or not fp.is_Qp or not regular_on_units(chi_beta(fp, chi, beta, 0)):
        raise ValueError("needs GL_4(Q_p) and chi beta_bar^{-1} regular on T_0")
    W = lambda *word: WeylElt.from_word(n, word)
    wo = W(1, 2, 1, 3, 2, 1)
    out = {}
    out["W'"] = set(W_beta_prime(n, beta)) == {wo * s * o for s in (W(), W(2)) for o in
                                               (W(), W(3, 2, 1), W(3, 2, 1, 3, 2, 1), W(1, 2, 3))}
    rb = right_adjoint_beta(fp, chi, beta, 0)
    m = rb.m
    idx = m_index(m)
    g1 = {wo, W(2, 1, 2), W(1, 3), W(2, 3, 2)}
    g2 = {W(1, 2, 3, 2, 1), W(1, 2), W(2, 1, 3), W(3, 2)}
    lo = {rb.basis_elements[int(np.nonzero(r)[0][0])] for r in rb.fil[rb.stab[0]]}
    out["Gr'_1"] = lo == g1
    out["Gr'_s2"] = set(rb.basis_elements) - lo == g2
    T1 = m.mats["s1"]
    ok = True
    for w in g1 | g2:
        row = T1[idx[w]]
        if w == W(1, 2):
            tgt = W(1, 2, 1)
            want = la.zeros(1, m.dim)[0]
            c = d_const(simple_root(1), act(W(1, 2, 1).inverse(), beta), n)
            z = chi.eval(lift(tgt) * lift(W(1)).inverse() * lift(w).inverse())
            want[idx[tgt]] = m.F.mul(z, m.F.from_int(c))
            ok &= bool(np.all(row == want))
        else:
            ok &= not np.any(row)
    out["T1 table"] = ok
    out["nonsplit"] = not fil_prime_splitting(rb).split
    return out


def counit_check(rb: RightAdjointBeta) -> bool:
    """eta^{x} . T_{w'} is a nonzero multiple of eta^{x w'} and the images are distinct."""
    m = rb.m
    n = m.n
    idx = m_index(m)
    reps = BetaData(n, rb.beta).left_reps()
    seen = set()
    Tv = {v: m.T_word([f"s{i}" for i in reduced_word(v)]) for v in reps}
    for x in rb.basis_elements:
        for v in reps:
            img = Tv[v][idx[x]]
            nz = np.nonzero(img)[0]
            tgt = x * v
            if len(nz) != 1 or tgt not in idx or nz[0] != idx[tgt]:
                return False
            seen.add(tgt)
    return len(seen) == m.dim


# ---- Fil_1 ----------------------------------------------------------------

def cross_term_active(fp: FieldParams, chi: SmoothCharacter, beta: Root, r: int) -> bool:
    """chi o beta^vee restricted to units equals x -> x_bar^{p^r}."""
    return chi.coroot_exponent(beta) == (fp.p ** r) % (fp.q - 1)


def build_fil1_piece(fp: FieldParams, chi: SmoothCharacter, beta: Root, r: int) -> HModule:
    """
    span{Theta^w, eta^w}: the piece of Fil_1 over m_{beta,r}, where Theta is
    x -> (varpi^{-1}(1 - beta(t^{-1})))_bar^{p^r} in Hom(T_1, C).  The theta^w come
    first and span a submodule.
    """
    n = chi.n
    F = fp.C
    ind = build_ind_chi(fp, chi)
    m = build_m_beta_r(fp, chi, beta, r)
    k = ind.dim
    on = cross_term_active(fp, chi, beta, r)
    mats = {}
    W = all_elements(n)
    for key in ind.levi.gen_keys():
        A = la.zeros(2 * k, 2 * k)
        A[:k, :k] = ind.mats[key]
        A[k:, k:] = m.mats[key]
        if on and key in ind.levi.affine_roots():
            a = ind.levi.affine_roots()[key].root
            for i, w in enumerate(W):
                if act(w, a) == -beta:
                    A[k + i, i] = F.neg(1)
        mats[key] = A
    labels = ind.labels + m.labels
    meta = {"chi": str(chi), "beta": str(beta), "r": r, "cross_term": on}
    return HModule(fp, ind.levi, labels, mats, f"Fil1[{beta},{r}]", meta)


def fil1_nonsplit_predicted(fp: FieldParams, chi: SmoothCharacter) -> list[Root]:
    """Simple roots beta with F = Q_p and chi = chi^{s_beta} beta_bar."""
    n = chi.n
    out = []
    if not fp.is_Qp:
        return out
    for i in range(1, n):
        b = simple_root(i)
        other = chi.twist(WeylElt.reflection(n, b)).mul_root(b, 1)
        if other.exps == chi.exps and other.uvals == chi.uvals:
            out.append(b)
    return out


@dataclass
class Fil1Verdict:
    split: bool
    predicted_split: bool
    pieces: dict[tuple[str, int], SplitResult]

    @property
    def agrees(self) -> bool:
        return self.split == self.predicted_split


def fil1_and_splitting(fp: FieldParams, chi: SmoothCharacter) -> Fil1Verdict:
    n = chi.n
    pieces = {}
    for i in range(1, n):
        b = simple_root(i)
        for r in range(fp.f):
            E = build_fil1_piece(fp, chi, b, r)
            pieces[(str(b), r)] = find_splitting(E, E.dim // 2)
    split = all(p.split for p in pieces.values())
    pred = not fil1_nonsplit_predicted(fp, chi)
    v = Fil1Verdict(split, pred, pieces)
    if not v.agrees:
        raise AssertionError("Fil_1 splitting verdict disagrees with the character criterion")
    return v


# ---- decomposition report ---------------------------------------------------

@dataclass
class DecomposeConfig:
    n: int
    fp: FieldParams
    chi: SmoothCharacter
    check_relations: bool = False
    all_levis: bool = False
    appendix: bool = False


def expected_total_dim(n: int, fp: FieldParams) -> int:
    tot = factorial(n) * fp.d(n)
    for b in positive_roots(n):
        tot += fp.f * factorial(n) // b.height
    return tot


def ext_vanishing_certificate(R: HModule, levi_simples) -> bool:
    """L from every proper sub-Levi of M_beta kills R, so no extension into lower levels."""
    J = sorted(levi_simples)
    from itertools import combinations
    for k in range(len(J)):
        for c in combinations(J, k):
            if left_adjoint_dim(R, c):
                return False
    return True


def _check_rel(cfg: DecomposeConfig, M: HModule):
    from .heckemod import check_relations
    if cfg.check_relations:
        rep = check_relations(M)
        if not rep.ok:
            raise AssertionError(f"{M.name}: relations fail {rep.violations[:5]}")


def decompose_task(cfg: DecomposeConfig, bjk: tuple[int, int], r: int) -> dict:
    """The summand entry of m_{beta,r}; independent across (beta, r)."""
    n, fp, chi = cfg.n, cfg.fp, cfg.chi
    b = Root(*bjk)
    m = build_m_beta_r(fp, chi, b, r)
    _check_rel(cfg, m)
    if b.height == 1:
        cls = classify_n(fp, chi, b, r)
        entry = {"beta": str(b), "r": r, "dim": m.dim, "levi": str(Levi.from_simples(n, [b.j])),
                 "supersingular": is_supersingular(m, cfg.all_levis), "n_type": cls.kind}
        if cfg.appendix:
            ap = appendix_isomorphism_check(fp, chi, b, r)
            if not ap.ok:
                raise AssertionError(f"appendix isomorphism fails at {b},{r}: {ap.failures}")
            entry["induced_iso"] = True
        return entry
    rb = right_adjoint_beta(fp, chi, b, r, m)
    if not rb.ok:
        bad = [k for k, v in rb.checks.items() if not v]
        raise AssertionError(f"right adjoint at {b},{r} fails {bad}")
    if not counit_check(rb):
        raise AssertionError(f"counit at {b},{r} is not bijective")
    if not ext_vanishing_certificate(rb.module, BetaData(n, b).levi_simples):
        raise AssertionError(f"extension certificate fails at {b},{r}")
    return {"beta": str(b), "r": r, "dim": m.dim,
            "levi": str(Levi.from_simples(n, BetaData(n, b).levi_simples)),
            "supersingular": is_supersingular(m, cfg.all_levis),
            "adjoint_dim": rb.module.dim}


def decompose_tasks(n: int, fp: FieldParams) -> list[tuple[tuple[int, int], int]]:
    """All (beta, r), ordered by (ht beta, beta, r)."""
    bs = sorted(positive_roots(n), key=lambda b: (b.height, b.j, b.k))
    return [((b.j, b.k), r) for b in bs for r in range(fp.f)]


def decompose_h1(cfg: DecomposeConfig, map_fn=None) -> dict:
    """
    Assemble the report.  map_fn(func, cfgs, betas, rs) may evaluate the independent
    (beta, r) tasks in parallel; results are consumed in task order.
    """
    from .heckemod import SCHEMA_VERSION
    n, fp, chi = cfg.n, cfg.fp, cfg.chi
    warnings: list[str] = []
    levels = []
    ind = build_ind_chi(fp, chi)
    _check_rel(cfg, ind)
    d = fp.d(n)
    levels.append({"a": 0, "dim": ind.dim * d, "split": True, "certificate": "section",
                   "summands": [{"kind": "Ind_T(chi)", "dim": ind.dim, "multiplicity": d,
                                 "levi": "T", "supersingular": False}]})
    total = ind.dim * d
    tasks = decompose_tasks(n, fp)
    mf = map_fn or map
    entries = list(mf(decompose_task, [cfg] * len(tasks), [t[0] for t in tasks],
                      [t[1] for t in tasks]))
    by_height: dict[int, list[dict]] = {}
    for (bjk, _), e in zip(tasks, entries):
        by_height.setdefault(bjk[1] - bjk[0], []).append(e)
        total += e["dim"]
    for a in range(1, n):
        summ = by_height.get(a, [])
        if a == 1:
            v = fil1_and_splitting(fp, chi)
            levels.append({"a": 1, "dim": sum(s["dim"] for s in summ), "split": v.split,
                           "certificate": "section" if v.split else "none-proof", "summands": summ})
        else:
            levels.append({"a": a, "dim": sum(s["dim"] for s in summ), "split": True,
                           "certificate": "ext-vanishing", "summands": summ})
    exp = expected_total_dim(n, fp)
    if total != exp:
        raise AssertionError(f"total dimension {total} != {exp}")
    top = [s for s in levels[-1]["summands"]] if n >= 3 else []
    if any(not s["supersingular"] for s in top):
        raise AssertionError("top graded piece is not supersingular")
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "h1_decomposition",
        "params": {"n": n, "p": fp.p, "f": fp.f, "e": fp.e, "zeta_p": fp.zeta_p,
                   "m": fp.C.m, "chi": str(chi)},
        "total_dim": total,
        "levels": levels,
        "warnings": warnings,
    }
