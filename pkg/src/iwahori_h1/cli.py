"""
Command-line interface.

    python -m iwahori_h1 decompose --n 3 --p 5 --chi "exps:[0,0,0];uvals:[1,1,1]"
    python -m iwahori_h1 verify --suite all --n 2 --p 5
    python -m iwahori_h1 dump --which m_beta_r --n 3 --p 5 --beta 1,3 --r 0

Reports are JSON with sorted keys.  Exit codes: 0 pass, 1 a check or
certificate failed, 2 bad usage.  Independent (beta, r) tasks of a
decomposition run in IWAHORI_H1_THREADS worker processes (default 1); the
report is assembled in task order, so its bytes do not depend on the count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .charfield import FieldParams, SmoothCharacter, generic_character, parse_character
from .weyl import Root

THREADS_ENV = "IWAHORI_H1_THREADS"
MAX_N = 6


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    n: int
    p: int
    f: int = 1
    e: int = 1
    zeta_p: bool = False
    m: int | None = None
    chi: str = "generic"
    beta: tuple[int, int] | None = None
    r: int | None = None
    suite: str = "all"
    out: str | None = None
    threads: int = 1
    K: int = 8
    allow_large: bool = False
    check_relations: bool = False
    all_levis: bool = False
    appendix: bool = False
    which: str = "m_beta_r"

    def __post_init__(self):
        if self.n < 2:
            raise UsageError("n must be at least 2")
        if self.n > MAX_N and not self.allow_large:
            raise UsageError(f"n > {MAX_N} needs --allow-large")
        if self.threads < 1:
            raise UsageError("thread count must be positive")
        if self.r is not None and not 0 <= self.r < self.f:
            raise UsageError("r must satisfy 0 <= r < f")

    @property
    def fp(self) -> FieldParams:
        try:
            return FieldParams(self.p, self.f, self.e, self.zeta_p, self.m)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    def character(self) -> SmoothCharacter:
        fp = self.fp
        if self.chi == "trivial":
            return SmoothCharacter.trivial(fp, self.n)
        if self.chi.startswith("generic"):
            seed = int(self.chi.split(":")[1]) if ":" in self.chi else 0
            return generic_character(fp, self.n, seed)
        try:
            return parse_character(self.chi, fp, self.n)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    def beta_root(self) -> Root:
        if self.beta is None:
            raise UsageError("--beta is required")
        j, k = self.beta
        if not 1 <= j < k <= self.n:
            raise UsageError(f"beta {j},{k} is not a positive root for n={self.n}")
        return Root(j, k)


def _emit(doc: dict, out: str | None):
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_decompose(cfg: RunConfig) -> dict:
    from .cohomology import DecomposeConfig, decompose_h1
    dc = DecomposeConfig(cfg.n, cfg.fp, cfg.character(), check_relations=cfg.check_relations,
                         all_levis=cfg.all_levis, appendix=cfg.appendix)
    if cfg.threads == 1:
        return decompose_h1(dc)
    with ProcessPoolExecutor(max_workers=cfg.threads) as ex:
        return decompose_h1(dc, map_fn=ex.map)


def cmd_verify(cfg: RunConfig) -> dict:
    from . import oracle
    fp = cfg.fp
    if not fp.is_Qp:
        raise UsageError("the matrix oracle needs f = e = 1")
    if cfg.n not in (2, 3):
        raise UsageError("the oracle suites cover n in {2, 3}")
    suites = ["conj", "unip", "graded"] if cfg.suite == "all" else [cfg.suite]
    K, V = cfg.K, max(4, cfg.K // 2)
    results = {}
    for s in suites:
        if s == "conj":
            rep = oracle.verify_conj_suite(fp, cfg.n, K, V)
            fac = oracle.verify_factorization(fp, cfg.n, K=K, V=V)
            results["conj"] = rep.to_json()
            results["factorization"] = fac.to_json()
        elif s == "unip":
            results["unip"] = oracle.verify_unip(fp, cfg.n, K, V).to_json()
        elif s == "graded":
            chis = None if cfg.chi == "generic" else [cfg.character()]
            results["graded"] = oracle.verify_graded(fp, cfg.n, chis, K, V).to_json()
        else:
            raise UsageError(f"unknown suite {s}")
    return {"kind": "verify_report", "params": {"n": cfg.n, "p": cfg.p, "K": cfg.K},
            "ok": all(v["ok"] for v in results.values()), "suites": results}


DUMPABLE = ("m_beta_r", "n_beta_r", "ind_n", "gr0", "ind_chi", "fil1", "right_adjoint")


def cmd_dump_module(cfg: RunConfig, which: str) -> dict:
    from . import cohomology as co
    fp, chi = cfg.fp, cfg.character()
    r = cfg.r or 0
    if which == "gr0":
        return co.build_gr0(fp, chi).to_json()
    if which == "ind_chi":
        return co.build_ind_chi(fp, chi).to_json()
    b = cfg.beta_root()
    if which == "m_beta_r":
        return co.build_m_beta_r(fp, chi, b, r).to_json()
    if which == "right_adjoint":
        return co.right_adjoint_beta(fp, chi, b, r).module.to_json()
    if b.height != 1:
        raise UsageError(f"{which} needs a simple root")
    if which == "n_beta_r":
        return co.build_n_F_beta_r(fp, chi, b, r).to_json()
    if which == "ind_n":
        return co.build_ind_n(co.build_n_F_beta_r(fp, chi, b, r), b)[0].to_json()
    if which == "fil1":
        return co.build_fil1_piece(fp, chi, b, r).to_json()
    raise UsageError(f"unknown module {which}")


def _beta_arg(text: str) -> tuple[int, int]:
    try:
        j, k = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("beta is written j,k") from None
    return j, k


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="iwahori-h1", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(sp):
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--p", type=int, required=True)
        sp.add_argument("--f", type=int, default=1)
        sp.add_argument("--e", type=int, default=1)
        sp.add_argument("--zeta-p", action="store_true")
        sp.add_argument("--m", type=int, default=None, help="degree of the coefficient field over F_p")
        sp.add_argument("--chi", default="generic",
                        help='"trivial", "generic[:seed]" or "exps:[..];uvals:[g^k,..]"')
        sp.add_argument("--out", default=None)
        sp.add_argument("--allow-large", action="store_true", help=f"permit n > {MAX_N}")

    d = sub.add_parser("decompose", help="graded pieces, splitting and supersingularity")
    common(d)
    d.add_argument("--check-relations", action="store_true")
    d.add_argument("--all-levis", action="store_true", help="test supersingularity on every Levi")
    d.add_argument("--check-induction", dest="appendix", action="store_true",
                   help="certify Ind(n) -> m for simple beta")
    d.add_argument("--threads", type=int, default=None)

    v = sub.add_parser("verify", help="matrix oracle suites over Q_p")
    common(v)
    v.add_argument("--suite", choices=["conj", "unip", "graded", "all"], default="all")
    v.add_argument("--K", type=int, default=8)

    du = sub.add_parser("dump", help="generator matrices of one module")
    common(du)
    du.add_argument("--which", choices=DUMPABLE, default="m_beta_r")
    du.add_argument("--beta", type=_beta_arg, default=None)
    du.add_argument("--r", type=int, default=None)
    return ap


def config_from_args(args) -> RunConfig:
    threads = getattr(args, "threads", None)
    if threads is None:
        env = os.environ.get(THREADS_ENV, "1")
        try:
            threads = int(env)
        except ValueError:
            raise UsageError(f"{THREADS_ENV}={env!r} is not an integer") from None
    return RunConfig(n=args.n, p=args.p, f=args.f, e=args.e, zeta_p=args.zeta_p, m=args.m,
                     chi=args.chi, beta=getattr(args, "beta", None), r=getattr(args, "r", None),
                     suite=getattr(args, "suite", "all"), out=args.out, threads=threads,
                     K=getattr(args, "K", 8), allow_large=args.allow_large,
                     check_relations=getattr(args, "check_relations", False),
                     all_levis=getattr(args, "all_levis", False),
                     appendix=getattr(args, "appendix", False),
                     which=getattr(args, "which", "m_beta_r"))


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
        if args.cmd == "decompose":
            doc = cmd_decompose(cfg)
            ok = True
        elif args.cmd == "verify":
            doc = cmd_verify(cfg)
            ok = doc["ok"]
        else:
            doc = cmd_dump_module(cfg, cfg.which)
            ok = True
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    _emit(doc, cfg.out)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
