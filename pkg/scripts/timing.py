"""Wall-clock time of the decompose command per rank and worker count."""
import argparse
import os
import subprocess
import sys
import time


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ranks", type=int, nargs="+", default=[3, 4, 5])
    ap.add_argument("--threads", type=int, nargs="+", default=[1, 4])
    ap.add_argument("--p", type=int, default=7)
    args = ap.parse_args()
    for n in args.ranks:
        digests = set()
        for th in args.threads:
            env = dict(os.environ, IWAHORI_H1_THREADS=str(th))
            t0 = time.perf_counter()
            out = subprocess.run([sys.executable, "-m", "iwahori_h1", "decompose", "--n", str(n),
                                  "--p", str(args.p)], env=env, capture_output=True, check=True).stdout
            digests.add(out)
            print(f"n={n} threads={th} {time.perf_counter() - t0:.1f}s", flush=True)
        print(f"n={n} outputs identical across thread counts: {len(digests) == 1}")


if __name__ == "__main__":
    main()
