"""Wall time of the fast normal-matrix product against the dense product."""

import argparse
import time

import numpy as np

from cosapprox import THOperator


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-log2", type=int, default=16)
    ap.add_argument("--dense-max-log2", type=int, default=11)
    ap.add_argument("--repeats", type=int, default=20)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    print(f"{'M':>8} {'fast [s]':>12} {'dense [s]':>12} {'ratio vs M/2':>14}")
    prev = None
    for p in range(4, args.max_log2 + 1):
        M = 2 ** p
        op = THOperator(rng.standard_normal(2 * M + 2))
        x = rng.standard_normal(M + 1)
        fast = best_of(lambda: op.matvec(x), args.repeats)
        dense = float("nan")
        if p <= args.dense_max_log2:
            A = op.todense()
            dense = best_of(lambda: A @ x, args.repeats)
        ratio = fast / prev if prev else float("nan")
        print(f"{M:>8} {fast:12.3e} {dense:12.3e} {ratio:14.2f}")
        prev = fast


if __name__ == "__main__":
    main()
