"""Command line front end.

Exit status: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from .approx import (CosinePoly, DuplicatePointsError, fit_1d, fit_2d, make_samples,
                     multilevel_fit)
from .experiment import (ExperimentSpec, GridField, GridSpec, RankDeficientError,
                         periodic_baseline_fit, relative_error, synth_experiment)
from .solver import SolverConfig

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

_HEADER_NAMES = {"x", "y", "value", "weight", "k", "l", "coefficient"}


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class NumericalError(Exception):
    pass


def _fmt(v):
    return format(float(v), ".17g")


def _read_rows(path):
    """Numeric rows of a CSV file as ``(line_number, [floats])`` plus comments."""
    try:
        with open(path, newline="") as fh:
            lines = fh.read().splitlines()
    except OSError as err:
        raise DataError(f"{path}: {err.strerror}") from err
    rows, comments = [], []
    seen_data = False
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        if text.startswith("#"):
            comments.append(text[1:].strip())
            continue
        fields = [f.strip() for f in text.split(",")]
        if not seen_data and all(f.lower() in _HEADER_NAMES for f in fields):
            seen_data = True
            continue
        seen_data = True
        try:
            nums = [float(f) for f in fields]
        except ValueError:
            raise DataError(f"{path}:{lineno}: cannot parse {text!r} as numbers") from None
        if not all(math.isfinite(v) for v in nums):
            raise DataError(f"{path}:{lineno}: non-finite value")
        rows.append((lineno, nums))
    if not rows:
        raise DataError(f"{path}: no data rows")
    return rows, comments


def ingest_csv(path, dim, weights=None, merge_duplicates=False):
    """Read ``x,value[,weight]`` (1D) or ``x,y,value[,weight]`` (2D) rows."""
    rows, _ = _read_rows(path)
    ncols = len(rows[0][1])
    if ncols not in (dim + 1, dim + 2):
        raise DataError(f"{path}:{rows[0][0]}: expected {dim + 1} or {dim + 2} columns, got {ncols}")
    for lineno, nums in rows:
        if len(nums) != ncols:
            raise DataError(f"{path}:{lineno}: expected {ncols} columns, got {len(nums)}")
    data = np.array([nums for _, nums in rows])
    pts = data[:, 0] if dim == 1 else data[:, :2]
    vals = data[:, dim]
    w = weights
    if ncols == dim + 2:
        w = data[:, dim + 1]
        if np.any(w <= 0):
            raise DataError(f"{path}: weights must be positive")
    try:
        return make_samples(pts, vals, w, merge_duplicates=merge_duplicates)
    except DuplicatePointsError as err:
        raise DataError(f"{path}: {err}") from err
    except ValueError as err:
        raise DataError(f"{path}: {err}") from err


def write_samples_csv(path, samples):
    with open(path, "w", newline="") as fh:
        if samples.dim == 1:
            fh.write("x,value,weight\n")
            x = samples.lo[0] + (samples.hi[0] - samples.lo[0]) * samples.x
            for xi, v, w in zip(x, samples.values, samples.weights):
                fh.write(f"{_fmt(xi)},{_fmt(v)},{_fmt(w)}\n")
        else:
            fh.write("x,y,value,weight\n")
            p = samples.lo + (samples.hi - samples.lo) * samples.points
            for (xi, yi), v, w in zip(p, samples.values, samples.weights):
                fh.write(f"{_fmt(xi)},{_fmt(yi)},{_fmt(v)},{_fmt(w)}\n")


def write_coeffs_csv(path, poly):
    c = poly.coeffs
    with open(path, "w", newline="") as fh:
        fh.write(f"# cosapprox coefficients dim={poly.dim}\n")
        for name, lo, hi in zip("xy", poly.lo, poly.hi):
            fh.write(f"# domain {name} {_fmt(lo)} {_fmt(hi)}\n")
        if poly.dim == 1:
            fh.write("k,coefficient\n")
            for k, v in enumerate(c):
                fh.write(f"{k},{_fmt(v)}\n")
        else:
            fh.write("k,l,coefficient\n")
            for l in range(c.shape[1]):
                for k in range(c.shape[0]):
                    fh.write(f"{k},{l},{_fmt(c[k, l])}\n")


def read_coeffs_csv(path):
    rows, comments = _read_rows(path)
    ncols = len(rows[0][1])
    if ncols not in (2, 3) or any(len(r) != ncols for _, r in rows):
        raise DataError(f"{path}: expected rows 'k,coefficient' or 'k,l,coefficient'")
    dim = ncols - 1
    lo, hi = np.zeros(dim), np.ones(dim)
    for text in comments:
        parts = text.split()
        if len(parts) == 4 and parts[0] == "domain" and parts[1] in "xy"[:dim]:
            i = "xy".index(parts[1])
            lo[i], hi[i] = float(parts[2]), float(parts[3])
    idx = np.array([[int(v) for v in r[:-1]] for _, r in rows])
    if np.any(idx < 0):
        raise DataError(f"{path}: negative coefficient index")
    shape = tuple(idx.max(axis=0) + 1)
    c = np.zeros(shape)
    c[tuple(idx.T)] = [r[-1] for _, r in rows]
    return CosinePoly(c, lo, hi)


def write_grid_csv(path, field):
    axes = field.axes()
    with open(path, "w", newline="") as fh:
        if field.grid.dim == 1:
            fh.write("x,value\n")
            for xi, v in zip(axes[0], field.values):
                fh.write(f"{_fmt(xi)},{_fmt(v)}\n")
        else:
            fh.write("x,y,value\n")
            for j, yj in enumerate(axes[1]):
                for i, xi in enumerate(axes[0]):
                    fh.write(f"{_fmt(xi)},{_fmt(yj)},{_fmt(field.values[i, j])}\n")


def read_grid_csv(path):
    """Return ``(coordinates, values)`` of a grid CSV in file order."""
    rows, _ = _read_rows(path)
    data = np.array([r for _, r in rows])
    if data.ndim != 2 or data.shape[1] not in (2, 3):
        raise DataError(f"{path}: expected rows 'x,value' or 'x,y,value'")
    return data[:, :-1], data[:, -1]


def write_pgm(path, field):
    """8-bit ASCII PGM; row 0 is the largest y, column 0 the smallest x."""
    v = field.values if field.grid.dim == 2 else field.values[:, None]
    img = v.T[::-1]
    lo, hi = float(img.min()), float(img.max())
    if hi > lo:
        gray = np.rint(255.0 * (img - lo) / (hi - lo)).astype(int)
    else:
        gray = np.full(img.shape, 128, dtype=int)
    with open(path, "w", newline="") as fh:
        fh.write("P2\n")
        fh.write(f"# min {_fmt(lo)} -> 0, max {_fmt(hi)} -> 255, linear\n")
        fh.write(f"{img.shape[1]} {img.shape[0]}\n255\n")
        for row in gray:
            fh.write(" ".join(str(g) for g in row) + "\n")


def _solver_config(args):
    try:
        return SolverConfig(tol=args.tol, max_iter=args.max_iter)
    except ValueError as err:
        raise UsageError(str(err)) from err


def _degrees(args, dim):
    if dim == 1:
        if args.degree is None:
            raise UsageError("--degree is required for 1D fits")
        return (args.degree,)
    mx = args.degree_x if args.degree_x is not None else args.degree
    my = args.degree_y if args.degree_y is not None else args.degree
    if mx is None or my is None:
        raise UsageError("2D fits need --degree or --degree-x/--degree-y")
    return (mx, my)


def _fit(samples, args):
    cfg = _solver_config(args)
    if args.mode == "multilevel":
        if args.epsilon is None:
            raise UsageError("--mode multilevel requires --epsilon")
        if args.epsilon <= 0:
            raise UsageError("--epsilon must be positive")
        m_max = args.max_degree
        if m_max is None:
            m_max = samples.r - 1 if samples.dim == 1 else int(math.isqrt(samples.r)) - 1
        poly, trace = multilevel_fit(samples, args.epsilon, m_max, m0=args.min_degree,
                                     cfg=cfg, literal=args.literal_discrepancy)
        last = trace.levels[-1]
        info = {
            "mode": "multilevel",
            "accepted": trace.accepted,
            "degree": last.degree,
            "levels": [vars(lv) | {"converged": bool(lv.converged)} for lv in trace.levels],
        }
        return poly, info
    degs = _degrees(args, samples.dim)
    if min(degs) < 0:
        raise UsageError("degrees must be non-negative")
    ncoef = int(np.prod([d + 1 for d in degs]))
    if (samples.dim == 1 and degs[0] >= samples.r) or ncoef > samples.r:
        raise UsageError(f"degree {degs} too large for {samples.r} samples")
    if samples.dim == 1:
        poly, report = fit_1d(samples, degs[0], cfg, path=args.path)
    else:
        poly, report = fit_2d(samples, degs[0], degs[1], cfg, path=args.path)
    info = {"mode": "fixed", "degree": list(degs), "total_coefficients": ncoef}
    info.update(report.to_dict())
    if not report.converged:
        info["error"] = f"solver did not converge ({report.status})"
    elif report.status == "rank_deficient":
        print("cosapprox: warning: normal matrix is numerically singular; "
              "coefficients are not unique", file=sys.stderr)
    return poly, info


def cmd_fit(args):
    samples = ingest_csv(args.data, args.dim, args.weights, args.merge_duplicates)
    poly, info = _fit(samples, args)
    write_coeffs_csv(args.out, poly)
    info["samples"] = samples.r
    print(json.dumps(info))
    if "error" in info:
        raise NumericalError(info["error"])


def _grid_field(poly, L, provenance="fit"):
    return GridField(poly.on_grid(L), GridSpec(poly.dim, L), provenance, poly.lo, poly.hi)


def cmd_eval(args):
    poly = read_coeffs_csv(args.coeffs)
    field = _grid_field(poly, args.grid)
    write_grid_csv(args.out, field)
    if args.heatmap:
        write_pgm(args.heatmap, field)


def cmd_synth(args):
    spec = _experiment_spec(args)
    samples, ref = synth_experiment(spec)
    write_samples_csv(args.out, samples)
    if args.reference:
        write_grid_csv(args.reference, ref)


def cmd_baseline(args):
    samples = ingest_csv(args.data, args.dim, args.weights, args.merge_duplicates)
    K = args.cutoff if args.dim == 1 else (args.cutoff, args.cutoff)
    try:
        field, _ = periodic_baseline_fit(samples, K, args.grid)
    except RankDeficientError as err:
        raise NumericalError(str(err)) from err
    except ValueError as err:
        raise UsageError(str(err)) from err
    write_grid_csv(args.out, field)
    info = {"baseline": "periodic", "cutoff": args.cutoff,
            "real_coefficients": (2 * args.cutoff + 1) ** args.dim}
    if args.reference:
        info["error"] = _grid_error(args.out, args.reference)
    print(json.dumps(info))


def _grid_error(fit_path, ref_path):
    cf, vf = read_grid_csv(fit_path)
    cr, vr = read_grid_csv(ref_path)
    if cf.shape != cr.shape or not np.allclose(cf, cr, rtol=1e-12, atol=1e-12):
        raise DataError("fit and reference grids do not match")
    try:
        return relative_error(vf, vr)
    except ValueError as err:
        raise DataError(str(err)) from err


def cmd_error(args):
    print(_fmt(_grid_error(args.fit, args.reference)))


def _experiment_spec(args):
    if args.experiment:
        try:
            with open(args.experiment) as fh:
                spec = ExperimentSpec.from_json(fh.read())
        except (OSError, ValueError, TypeError) as err:
            raise DataError(f"{args.experiment}: {err}") from err
    else:
        spec = ExperimentSpec()
    overrides = {"generator": args.generator, "r": args.r, "noise_fraction": args.noise,
                 "seed": args.seed, "grid_L": args.grid}
    for key, val in overrides.items():
        if val is not None:
            setattr(spec, key, val)
    try:
        spec.__post_init__()
    except ValueError as err:
        raise UsageError(str(err)) from err
    return spec


def cmd_experiment(args):
    spec = _experiment_spec(args)
    samples, ref = synth_experiment(spec)
    mx = args.degree_x if args.degree_x is not None else args.degree
    my = args.degree_y if args.degree_y is not None else args.degree
    if (mx + 1) * (my + 1) > samples.r:
        raise UsageError("too many coefficients for the sample count")
    poly, report = fit_2d(samples, mx, my, _solver_config(args))
    fit = _grid_field(poly, spec.grid_L)
    info = {
        "seed": spec.seed, "samples": samples.r, "noise_fraction": spec.noise_fraction,
        "degree": [mx, my], "total_coefficients": (mx + 1) * (my + 1),
        "iterations": report.iterations, "status": report.status,
        "error_cosine": relative_error(fit, ref),
    }
    if args.baseline == "periodic":
        # same coefficient count per axis: 2K + 1 = M + 1
        kx, ky = mx // 2, my // 2
        base, err = periodic_baseline_fit(samples, (kx, ky), spec.grid_L, ref)
        info["error_periodic"] = err
        info["periodic_cutoff"] = [kx, ky]
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        write_samples_csv(os.path.join(args.out, "samples.csv"), samples)
        write_grid_csv(os.path.join(args.out, "reference.csv"), ref)
        write_coeffs_csv(os.path.join(args.out, "coefficients.csv"), poly)
        write_grid_csv(os.path.join(args.out, "cosine_grid.csv"), fit)
        if args.baseline == "periodic":
            write_grid_csv(os.path.join(args.out, "periodic_grid.csv"), base)
        if args.heatmap:
            write_pgm(os.path.join(args.out, "cosine_grid.pgm"), fit)
            write_pgm(os.path.join(args.out, "reference.pgm"), ref)
    print(json.dumps(info))
    if not report.converged:
        raise NumericalError(f"solver did not converge ({report.status})")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _add_solver_flags(p):
    p.add_argument("--tol", type=float, default=1e-8, help="relative CG residual tolerance")
    p.add_argument("--max-iter", type=int, default=None)


def _add_data_flags(p):
    p.add_argument("data", help="CSV with x[,y],value[,weight] rows")
    p.add_argument("--dim", type=int, choices=(1, 2), default=1)
    p.add_argument("--weights", choices=("midpoint", "uniform"), default=None,
                   help="default: midpoint in 1D, uniform in 2D")
    p.add_argument("--merge-duplicates", action="store_true",
                   help="average values at coincident points instead of failing")


def _add_experiment_flags(p):
    p.add_argument("--experiment", help="JSON file with an experiment description")
    p.add_argument("--generator", choices=("gaussian", "box"))
    p.add_argument("--r", type=int, help="number of random samples")
    p.add_argument("--noise", type=float, help="noise as a fraction of the sample l2 norm")
    p.add_argument("--seed", type=int)
    p.add_argument("--grid", type=int, help="grid resolution L (L + 1 nodes per axis)")


def build_parser():
    parser = _Parser(prog="cosapprox",
                     description="Scattered data approximation by cosine polynomials.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit a cosine polynomial to scattered samples")
    _add_data_flags(p)
    p.add_argument("--degree", type=int)
    p.add_argument("--degree-x", type=int)
    p.add_argument("--degree-y", type=int)
    p.add_argument("--mode", choices=("fixed", "multilevel"), default="fixed")
    p.add_argument("--epsilon", type=float, help="discrepancy level for multilevel mode")
    p.add_argument("--min-degree", type=int, default=1)
    p.add_argument("--max-degree", type=int)
    p.add_argument("--literal-discrepancy", action="store_true",
                   help="first-power residual in the discrepancy test")
    p.add_argument("--path", choices=("normal", "direct-ls"), default="normal")
    _add_solver_flags(p)
    p.add_argument("--out", required=True, help="coefficient CSV to write")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("eval", help="evaluate coefficients on a uniform grid")
    p.add_argument("coeffs")
    p.add_argument("--grid", type=int, default=150)
    p.add_argument("--out", required=True)
    p.add_argument("--heatmap", help="optional P2 PGM image")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="draw samples of a synthetic anomaly field")
    _add_experiment_flags(p)
    p.add_argument("--out", required=True, help="sample CSV to write")
    p.add_argument("--reference", help="grid CSV of the noiseless field")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("baseline", help="periodic trigonometric least-squares baseline")
    _add_data_flags(p)
    p.add_argument("--baseline", choices=("periodic",), default="periodic")
    p.add_argument("--cutoff", type=int, required=True, help="frequency cutoff K per axis")
    p.add_argument("--grid", type=int, default=150)
    p.add_argument("--reference", help="reference grid CSV for an error figure")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("error", help="relative l2 error between two grid CSVs")
    p.add_argument("fit")
    p.add_argument("reference")
    p.set_defaults(func=cmd_error)

    p = sub.add_parser("experiment", help="synthetic 2D gridding run with error report")
    _add_experiment_flags(p)
    p.add_argument("--degree", type=int, default=10)
    p.add_argument("--degree-x", type=int)
    p.add_argument("--degree-y", type=int)
    p.add_argument("--baseline", choices=("periodic", "none"), default="periodic")
    _add_solver_flags(p)
    p.add_argument("--out", help="directory for samples, grids and coefficients")
    p.add_argument("--heatmap", action="store_true")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as stop:
        # --help exits 0, argument errors exit EXIT_USAGE
        return stop.code if isinstance(stop.code, int) else EXIT_USAGE
    try:
        args.func(args)
    except UsageError as err:
        print(f"cosapprox: usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as err:
        print(f"cosapprox: data error: {err}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as err:
        print(f"cosapprox: numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as err:
        print(f"cosapprox: {err}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
