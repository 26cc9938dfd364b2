"""Weighted least-squares fits by cosine polynomials in one and two dimensions."""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .nudct import (cosine_sums, cosine_sums_2d, eval_poly, eval_poly_2d,
                    eval_poly_2d_grid, eval_poly_grid)
from .solver import (IndefiniteOperatorError, SolverConfig, cg_error_predictor,
                     cg_solve, condition_bound, lsqr_solve, max_gap)
from .th_operator import SQRT1_2, THOperator, assemble_1d, assemble_2d

# CG curvature ratio below which a 2D system is reported as numerically singular
RANK_DEFICIENCY_RATIO = 1e-13
# relative miss of the probe solve that marks a numerical null space
RANK_PROBE_THRESHOLD = 1e-3


class DuplicatePointsError(ValueError):
    pass


def midpoint_weights(x):
    """``w_j = (x_{j+1} - x_{j-1}) / 2`` with ghost points ``-x_1`` and ``2 - x_r``.

    ``x`` must be sorted ascending. For ``x_1 = 0`` and ``x_r = 1`` the
    weights sum to one.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("need a non-empty 1D point set")
    if np.any(np.diff(x) <= 0):
        raise ValueError("points must be strictly increasing")
    ext = np.concatenate([[-x[0]], x, [2.0 - x[-1]]])
    return 0.5 * (ext[2:] - ext[:-2])


@dataclass
class SampleSet:
    """Scattered samples on ``[0, 1]**d`` plus the map back to user coordinates.

    ``points`` is ``(r,)`` in 1D (sorted) or ``(r, 2)`` in 2D. ``lo`` and
    ``hi`` give the original bounding box that ``[0, 1]**d`` stands for.
    Use :func:`make_samples` to build one from raw data.
    """

    points: np.ndarray
    values: np.ndarray
    weights: np.ndarray
    lo: Optional[np.ndarray] = None
    hi: Optional[np.ndarray] = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.points.ndim not in (1, 2) or (self.points.ndim == 2 and self.points.shape[1] != 2):
            raise ValueError("points must have shape (r,) or (r, 2)")
        r = self.points.shape[0]
        if r == 0:
            raise ValueError("empty sample set")
        if self.values.shape != (r,) or self.weights.shape != (r,):
            raise ValueError("values and weights must match the number of points")
        for name, arr in (("points", self.points), ("values", self.values),
                          ("weights", self.weights)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
        if not np.all(self.weights > 0):
            raise ValueError("weights must be positive")
        if self.points.min() < 0.0 or self.points.max() > 1.0:
            raise ValueError("points must lie in the unit interval/square")
        d = self.dim
        self.lo = np.zeros(d) if self.lo is None else np.asarray(self.lo, dtype=float)
        self.hi = np.ones(d) if self.hi is None else np.asarray(self.hi, dtype=float)

    @property
    def dim(self):
        return 1 if self.points.ndim == 1 else 2

    @property
    def r(self):
        return self.points.shape[0]

    @property
    def x(self):
        return self.points if self.dim == 1 else self.points[:, 0]

    @property
    def y(self):
        return None if self.dim == 1 else self.points[:, 1]

    def weighted_values(self):
        return np.sqrt(self.weights) * self.values


def _merge_duplicates(pts, values, weights):
    keys, inverse, counts = np.unique(pts, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.ravel()
    vals = np.bincount(inverse, weights=values) / counts
    w = None if weights is None else np.bincount(inverse, weights=weights)
    return keys, vals, w


def make_samples(points, values, weights=None, merge_duplicates=False):
    """Validate, normalize and weight raw scattered data.

    Parameters
    ----------
    points : (r,) or (r, 2) array
        Sample locations in user coordinates. If any coordinate falls outside
        ``[0, 1]`` every axis is mapped affinely from its bounding box.
    values : (r,) array
    weights : array, "midpoint", "uniform" or None
        ``None`` picks midpoint weights in 1D and ``1/r`` in 2D.
    merge_duplicates : bool
        Average values at coincident points (explicit weights are added).
        Otherwise coincident points raise :class:`DuplicatePointsError`.
    """
    pts = np.asarray(points, dtype=float)
    values = np.asarray(values, dtype=float)
    if pts.ndim == 2 and pts.shape[1] == 1:
        pts = pts[:, 0]
    dim = 1 if pts.ndim == 1 else 2
    explicit = weights is not None and not isinstance(weights, str)
    w = np.asarray(weights, dtype=float) if explicit else None
    if values.shape != (pts.shape[0],):
        raise ValueError("values must match the number of points")
    if w is not None and w.shape != values.shape:
        raise ValueError("weights must match the number of points")
    if pts.shape[0] == 0:
        raise ValueError("empty sample set")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")

    keyed = pts.reshape(pts.shape[0], -1)
    if np.unique(keyed, axis=0).shape[0] != keyed.shape[0]:
        if not merge_duplicates:
            raise DuplicatePointsError("sampling points must be pairwise distinct")
        keyed, values, w = _merge_duplicates(keyed, values, w)
        pts = keyed[:, 0] if dim == 1 else keyed

    coords = pts.reshape(pts.shape[0], -1)
    if coords.min() < 0.0 or coords.max() > 1.0:
        lo = coords.min(axis=0)
        hi = coords.max(axis=0)
        hi = np.where(hi > lo, hi, lo + 1.0)
        coords = np.clip((coords - lo) / (hi - lo), 0.0, 1.0)
    else:
        lo = np.zeros(dim)
        hi = np.ones(dim)
    pts = coords[:, 0] if dim == 1 else coords

    if dim == 1:
        order = np.argsort(pts, kind="stable")
        pts, values = pts[order], values[order]
        if w is not None:
            w = w[order]
        if np.any(np.diff(pts) <= 0):
            raise DuplicatePointsError("points collapse after normalization")

    if w is None:
        kind = weights or ("midpoint" if dim == 1 else "uniform")
        if kind == "midpoint":
            if dim != 1:
                raise ValueError("midpoint weights are defined for 1D data only")
            w = midpoint_weights(pts)
        elif kind == "uniform":
            w = np.full(values.size, 1.0 / values.size)
        else:
            raise ValueError(f"unknown weight policy {kind!r}")
    return SampleSet(pts, values, w, lo, hi)


@dataclass
class CosinePoly:
    """Coefficients of a scaled cosine polynomial.

    1D: ``p(x) = c[0]/sqrt(2) + sum_k c[k] cos(pi k x)``.
    2D: ``c`` has shape ``(Mx + 1, My + 1)`` and only ``c[0, 0]`` is scaled.
    ``lo``/``hi`` map user coordinates onto ``[0, 1]**d``.
    """

    coeffs: np.ndarray
    lo: Optional[np.ndarray] = None
    hi: Optional[np.ndarray] = None

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.ndim not in (1, 2) or self.coeffs.size == 0:
            raise ValueError("coefficients must be a non-empty 1D or 2D array")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("coefficients must be finite")
        d = self.dim
        self.lo = np.zeros(d) if self.lo is None else np.asarray(self.lo, dtype=float)
        self.hi = np.ones(d) if self.hi is None else np.asarray(self.hi, dtype=float)

    @property
    def dim(self):
        return self.coeffs.ndim

    @property
    def degree(self):
        return self.coeffs.shape[0] - 1 if self.dim == 1 else tuple(n - 1 for n in self.coeffs.shape)

    def norm_sq(self):
        """``||p||_2^2`` over ``[0, 1]**d`` (exact, by orthogonality)."""
        if self.dim == 1:
            return 0.5 * float(self.coeffs @ self.coeffs)
        c2 = self.coeffs ** 2
        # ||cos(pi k x)||^2 is 1 for k = 0 and 1/2 otherwise
        fx = np.where(np.arange(c2.shape[0]) == 0, 1.0, 0.5)
        fy = np.where(np.arange(c2.shape[1]) == 0, 1.0, 0.5)
        f = np.outer(fx, fy)
        f[0, 0] = 0.5
        return float(np.sum(f * c2))

    def _normalize(self, t, axis):
        return (np.asarray(t, dtype=float) - self.lo[axis]) / (self.hi[axis] - self.lo[axis])

    def __call__(self, x, y=None):
        """Evaluate at user coordinates."""
        if self.dim == 1:
            return eval_poly(self.coeffs, self._normalize(np.atleast_1d(x), 0))
        if y is None:
            raise TypeError("2D polynomial needs x and y")
        return eval_poly_2d(self.coeffs, self._normalize(np.atleast_1d(x), 0),
                            self._normalize(np.atleast_1d(y), 1))

    def at_unit(self, x, y=None):
        """Evaluate at normalized coordinates in ``[0, 1]**d``."""
        if self.dim == 1:
            return eval_poly(self.coeffs, x)
        return eval_poly_2d(self.coeffs, x, y)

    def grid_axes(self, L):
        return tuple(self.lo[i] + (self.hi[i] - self.lo[i]) * np.arange(L + 1) / L
                     for i in range(self.dim))

    def on_grid(self, L):
        """Values on the uniform grid with ``L + 1`` nodes per axis (fast path)."""
        if self.dim == 1:
            return eval_poly_grid(self.coeffs, L)
        return eval_poly_2d_grid(self.coeffs, L, L)


@dataclass
class LevelRecord:
    degree: int
    iterations: int
    residual: float
    threshold: float
    accepted: bool
    converged: bool


@dataclass
class LevelTrace:
    levels: list = field(default_factory=list)

    @property
    def accepted(self):
        return bool(self.levels) and self.levels[-1].accepted

    @property
    def degrees(self):
        return [lv.degree for lv in self.levels]

    @property
    def residuals(self):
        return [lv.residual for lv in self.levels]


def residual(samples, poly):
    """Return ``(sum w_j |p(x_j) - s_j|^2, sum w_j |s_j|^2)``."""
    p = _eval_at_samples(samples, poly.coeffs)
    w, s = samples.weights, samples.values
    return float(np.sum(w * (p - s) ** 2)), float(np.sum(w * s ** 2))


def _eval_at_samples(samples, coeffs):
    if samples.dim == 1:
        return eval_poly(coeffs, samples.x)
    return eval_poly_2d(coeffs, samples.x, samples.y)


def _sampling_operator_1d(samples, M):
    sw = np.sqrt(samples.weights)
    x = samples.x

    def apply_v(c):
        return sw * eval_poly(c, x)

    def apply_vt(v):
        g = cosine_sums(x, sw * v, M)
        g[0] *= SQRT1_2
        return g

    return apply_v, apply_vt


def _sampling_operator_2d(samples, Mx, My):
    sw = np.sqrt(samples.weights)
    x, y = samples.x, samples.y
    shape = (Mx + 1, My + 1)

    def apply_v(c):
        return sw * eval_poly_2d(np.reshape(c, shape, order="F"), x, y)

    def apply_vt(v):
        g = cosine_sums_2d(x, y, sw * v, Mx, My)
        g[0, 0] *= SQRT1_2
        return g.ravel(order="F")

    return apply_v, apply_vt


def _attach_bounds(report, samples, M):
    if samples.dim != 1 or M == 0:
        return
    if not np.allclose(samples.weights, midpoint_weights(samples.x), rtol=1e-12, atol=0):
        return
    bound = condition_bound(max_gap(samples.x), M)
    report.kappa_bound = bound
    if bound is not None:
        n = np.arange(report.iterations + 1)
        report.predicted_error_curve = [float(e) for e in cg_error_predictor(bound, 1.0, n)]


def fit_1d(samples, M, cfg=None, path="normal"):
    """Weighted least-squares cosine fit of degree ``M`` to 1D samples.

    ``path="normal"`` runs CG on the Toeplitz+Hankel normal equations;
    ``path="direct-ls"`` runs LSQR on the sampling matrix instead.

    Returns ``(CosinePoly, SolveReport)``.
    """
    if samples.dim != 1:
        raise ValueError("fit_1d needs 1D samples")
    M = int(M)
    if M < 0:
        raise ValueError("degree must be non-negative")
    if M >= samples.r:
        raise ValueError(f"degree M={M} needs more than {samples.r} samples (M < r)")
    cfg = cfg or SolverConfig()
    if path == "normal":
        op, b = assemble_1d(samples.x, samples.weights, samples.values, M)
        c, report = cg_solve(op.matvec, b, cfg)
    elif path == "direct-ls":
        apply_v, apply_vt = _sampling_operator_1d(samples, M)
        c, report = lsqr_solve(apply_v, apply_vt, samples.weighted_values(), M + 1, cfg)
    else:
        raise ValueError(f"unknown path {path!r}")
    _attach_bounds(report, samples, M)
    return CosinePoly(c, samples.lo, samples.hi), report


def _has_null_space(apply, n):
    # CG from zero stays in range(A); solving A z = A u for a random u misses
    # u by its null-space component, which plain CG never notices.
    u = np.random.default_rng(n).standard_normal(n)
    try:
        z, rep = cg_solve(apply, apply(u), SolverConfig(tol=1e-12, max_iter=4 * n))
    except IndefiniteOperatorError:
        return True
    return np.linalg.norm(z - u) > RANK_PROBE_THRESHOLD * np.linalg.norm(u)


def fit_2d(samples, Mx, My, cfg=None, path="normal", check_rank=True):
    """Weighted least-squares fit by a 2D cosine polynomial of degrees ``(Mx, My)``.

    A numerically singular system (e.g. all samples on one algebraic curve)
    is not an error: the CG iterate, a least-norm type solution, comes back
    with ``report.status == "rank_deficient"``. ``check_rank`` runs one extra
    probe solve to detect this even when CG itself converges.
    """
    if samples.dim != 2:
        raise ValueError("fit_2d needs 2D samples")
    Mx, My = int(Mx), int(My)
    if Mx < 0 or My < 0:
        raise ValueError("degrees must be non-negative")
    n = (Mx + 1) * (My + 1)
    if n > samples.r:
        raise ValueError(f"{n} coefficients need at least as many samples, got {samples.r}")
    cfg = cfg or SolverConfig()
    if cfg.x0 is not None:
        cfg = SolverConfig(cfg.tol, cfg.max_iter, np.asarray(cfg.x0).ravel(order="F"))
    if path == "normal":
        op, b = assemble_2d(samples.x, samples.y, samples.weights, samples.values, Mx, My)
        try:
            c, report = cg_solve(op.matvec, b.ravel(order="F"), cfg)
        except IndefiniteOperatorError as err:
            c, report = err.x, err.report
            report.status = "rank_deficient"
            report.converged = False
        else:
            cr = report.curvature_range
            if cr and cr[0] <= RANK_DEFICIENCY_RATIO * cr[1]:
                report.status = "rank_deficient"
            elif check_rank and _has_null_space(op.matvec, n):
                report.status = "rank_deficient"
    elif path == "direct-ls":
        apply_v, apply_vt = _sampling_operator_2d(samples, Mx, My)
        c, report = lsqr_solve(apply_v, apply_vt, samples.weighted_values(), n, cfg)
    else:
        raise ValueError(f"unknown path {path!r}")
    coeffs = np.reshape(c, (Mx + 1, My + 1), order="F")
    return CosinePoly(coeffs, samples.lo, samples.hi), report


def _discrepancy(samples, coeffs, literal):
    p = _eval_at_samples(samples, coeffs)
    w, s = samples.weights, samples.values
    err = np.abs(p - s)
    res = float(np.sum(w * err)) if literal else float(np.sum(w * err ** 2))
    return res, float(np.sum(w * s ** 2))


class _IncrementalMoments1D:
    """Raw cosine sums of ``w`` and ``w s``, extended only as the degree grows."""

    def __init__(self, samples):
        self.x = samples.x
        self.w = samples.weights
        self.ws = samples.weights * samples.values
        self.gw = np.zeros(0)
        self.gs = np.zeros(0)

    def system(self, M):
        need_w, need_s = 2 * M + 2, M + 1
        if self.gw.size < need_w:
            self.gw = np.concatenate(
                [self.gw, cosine_sums(self.x, self.w, need_w - 1, start=self.gw.size)])
        if self.gs.size < need_s:
            self.gs = np.concatenate(
                [self.gs, cosine_sums(self.x, self.ws, need_s - 1, start=self.gs.size)])
        b = self.gs[:need_s].copy()
        b[0] *= SQRT1_2
        return THOperator(0.5 * self.gw[:need_w]), b


def multilevel_fit(samples, epsilon, m_max, m0=1, step=1, degrees=None, cfg=None,
                   literal=False, warm_start=True):
    """Raise the degree level by level until the discrepancy principle holds.

    A level of degree ``M`` is accepted when
    ``sum w_j |p(x_j) - s_j|^2 <= epsilon * sum w_j |s_j|^2``
    (``literal=True`` uses the first power of ``|p(x_j) - s_j|`` on the left).
    Each level starts CG from the previous coefficients padded with zeros.
    In 2D the degree is raised isotropically, ``Mx = My = M``.

    Returns ``(CosinePoly, LevelTrace)``; if ``m_max`` is reached without
    acceptance the last fit is returned and ``trace.accepted`` is False.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    cfg = cfg or SolverConfig()
    if degrees is None:
        if step < 1:
            raise ValueError("step must be >= 1")
        degrees = range(int(m0), int(m_max) + 1, int(step))
    degrees = [int(d) for d in degrees]
    if not degrees or any(b <= a for a, b in zip(degrees, degrees[1:])) or degrees[0] < 0:
        raise ValueError("level degrees must be non-negative and strictly increasing")

    trace = LevelTrace()
    moments = _IncrementalMoments1D(samples) if samples.dim == 1 else None
    prev = None
    poly = None
    for M in degrees:
        ncoef = M + 1 if samples.dim == 1 else (M + 1) ** 2
        if ncoef > samples.r or (samples.dim == 1 and M >= samples.r):
            break
        x0 = None
        if warm_start and prev is not None:
            x0 = np.zeros((M + 1,) * samples.dim)
            x0[tuple(slice(0, n) for n in prev.shape)] = prev
        level_cfg = SolverConfig(cfg.tol, cfg.max_iter, x0)
        if samples.dim == 1:
            op, b = moments.system(M)
            c, report = cg_solve(op.matvec, b, level_cfg)
            poly = CosinePoly(c, samples.lo, samples.hi)
        else:
            poly, report = fit_2d(samples, M, M, level_cfg)
        res, norm = _discrepancy(samples, poly.coeffs, literal)
        threshold = epsilon * norm
        ok = res <= threshold
        trace.levels.append(LevelRecord(M, report.iterations, res, threshold, ok,
                                        report.converged))
        prev = poly.coeffs
        if ok:
            break
    if poly is None:
        raise ValueError("no admissible level: the first degree needs more samples")
    return poly, trace
