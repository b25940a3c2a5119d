"""Run the matrix oracle suites over a grid of (n, p, K) and report counts per suite."""
import argparse
import time
from dataclasses import dataclass, field

from iwahori_h1.charfield import FieldParams
from iwahori_h1.oracle import verify_conj_suite, verify_factorization, verify_graded


@dataclass
class AuditConfig:
    ranks: list[int] = field(default_factory=lambda: [2, 3])
    primes: list[int] = field(default_factory=lambda: [3, 5, 7])
    precisions: list[int] = field(default_factory=lambda: [8, 16])
    graded: bool = True


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", type=int, nargs="+")
    ap.add_argument("--no-graded", action="store_true")
    args = ap.parse_args()
    cfg = AuditConfig(graded=not args.no_graded)
    if args.primes:
        cfg.primes = args.primes
    print(f"{'n':>2} {'p':>2} {'K':>3}  {'suite':<14} {'checks':>7} {'fail':>5} {'sec':>6}")
    bad = 0
    for n in cfg.ranks:
        for p in cfg.primes:
            fp = FieldParams(p)
            for K in cfg.precisions:
                V = K // 2
                runs = [("conj", lambda: verify_conj_suite(fp, n, K, V)),
                        ("factorization", lambda: verify_factorization(fp, n, K=K, V=V))]
                if cfg.graded and (n, p) != (3, 7):
                    runs.append(("graded", lambda: verify_graded(fp, n, K=K, V=V)))
                for name, fn in runs:
                    t0 = time.perf_counter()
                    rep = fn()
                    dt = time.perf_counter() - t0
                    if name == "graded":
                        checks = sum(c["zero_checks"] for c in rep.cases)
                        fails = sum(not c["ok"] for c in rep.cases)
                    else:
                        checks, fails = rep.checks, len(rep.failures)
                    bad += fails
                    print(f"{n:>2} {p:>2} {K:>3}  {name:<14} {checks:>7} {fails:>5} {dt:>6.1f}", flush=True)
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
