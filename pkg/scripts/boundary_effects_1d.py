"""Compare cosine and periodic least squares on non-periodic 1D functions.

Both fits use the same samples and weights and roughly the same number of
real coefficients (M + 1 = 16 cosine terms, 2K + 1 = 31 periodic terms by
default). Prints grid errors per seed and the ratio periodic / cosine.
"""

import argparse

import numpy as np

from cosapprox import (GridField, GridSpec, SolverConfig, fit_1d, make_samples,
                       periodic_baseline_fit, relative_error)

FUNCTIONS = {
    "x": lambda u: u,
    "x^2": lambda u: u ** 2,
    "exp": np.exp,
    "cos(2 pi x)": lambda u: np.cos(2 * np.pi * u),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--r", type=int, default=300)
    ap.add_argument("--degree", type=int, default=15)
    ap.add_argument("--cutoff", type=int, default=15)
    ap.add_argument("--grid", type=int, default=1000)
    ap.add_argument("--seeds", type=int, default=10)
    args = ap.parse_args()

    t = np.arange(args.grid + 1) / args.grid
    print(f"{'f':>12} {'seed':>4} {'cosine':>10} {'periodic':>10} {'ratio':>8}")
    for name, f in FUNCTIONS.items():
        ref = GridField(f(t), GridSpec(1, args.grid), "reference")
        for seed in range(args.seeds):
            x = np.random.default_rng(seed).random(args.r)
            s = make_samples(x, f(x))
            poly, _ = fit_1d(s, args.degree, SolverConfig(tol=1e-12))
            e_cos = relative_error(poly.on_grid(args.grid), ref)
            _, e_per = periodic_baseline_fit(s, args.cutoff, args.grid, ref)
            print(f"{name:>12} {seed:>4} {e_cos:10.2e} {e_per:10.2e} {e_per / e_cos:8.1f}")


if __name__ == "__main__":
    main()
