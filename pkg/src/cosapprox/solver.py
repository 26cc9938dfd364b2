"""Conjugate gradients on the normal equations, LSQR on the sampling matrix,
and the a priori conditioning estimates for midpoint-weighted 1D problems."""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse.linalg


@dataclass
class SolverConfig:
    """Iteration controls shared by the CG and LSQR paths.

    ``max_iter=None`` resolves to ``4 * n`` for a system of order ``n``.
    """

    tol: float = 1e-8
    max_iter: Optional[int] = None
    x0: Optional[np.ndarray] = None

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")

    def iteration_limit(self, n):
        return 4 * n if self.max_iter is None else int(self.max_iter)


@dataclass
class SolveReport:
    iterations: int = 0
    residual_history: list = field(default_factory=list)
    converged: bool = False
    status: str = ""
    kappa_bound: Optional[float] = None
    predicted_error_curve: Optional[list] = None
    # extreme Rayleigh quotients p^T A p / p^T p seen by CG
    curvature_range: Optional[tuple] = None

    def to_dict(self):
        return {
            "iterations": self.iterations,
            "converged": bool(self.converged),
            "status": self.status,
            "final_residual": float(self.residual_history[-1]) if self.residual_history else None,
            "residual_history": [float(r) for r in self.residual_history],
            "kappa_bound": self.kappa_bound,
            "predicted_error_curve": self.predicted_error_curve,
            "curvature_range": ([float(v) for v in self.curvature_range]
                                if self.curvature_range else None),
        }


class IndefiniteOperatorError(ArithmeticError):
    """CG met a direction with ``p^T A p <= 0``.

    The iterate reached so far and the partial report are attached.
    """

    def __init__(self, msg, x, report):
        super().__init__(msg)
        self.x = x
        self.report = report


class AdjointMismatchError(ValueError):
    pass


def cg_solve(apply: Callable, b, cfg: Optional[SolverConfig] = None):
    """Solve ``A x = b`` for symmetric positive definite ``A`` given as a callback.

    Stops once ``||b - A x|| <= tol ||b||``. Exhausting ``max_iter`` is not an
    error: the report comes back with ``converged=False``.

    Returns
    -------
    x : ndarray
    report : SolveReport
    """
    cfg = cfg or SolverConfig()
    b = np.asarray(b, dtype=float)
    n = b.size
    report = SolveReport()
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        report.converged = True
        report.status = "zero_rhs"
        report.residual_history = [0.0]
        return np.zeros_like(b), report

    if cfg.x0 is None:
        x = np.zeros_like(b)
        r = b.copy()
    else:
        x = np.array(cfg.x0, dtype=float).reshape(b.shape)
        r = b - apply(x)
    rr = float(r.ravel() @ r.ravel())
    report.residual_history.append(math.sqrt(rr) / bnorm)
    limit = cfg.iteration_limit(n)
    threshold = cfg.tol * bnorm
    p = r.copy()
    lo, hi = math.inf, 0.0

    while math.sqrt(rr) > threshold and report.iterations < limit:
        Ap = apply(p)
        pAp = float(p.ravel() @ Ap.ravel())
        pp = float(p.ravel() @ p.ravel())
        if not pAp > 0.0:
            report.status = "indefinite"
            report.curvature_range = (lo, hi) if hi else None
            raise IndefiniteOperatorError(
                f"p^T A p = {pAp:.3e} at iteration {report.iterations + 1}; "
                "operator is not positive definite", x, report)
        lo, hi = min(lo, pAp / pp), max(hi, pAp / pp)
        alpha = rr / pAp
        x = x + alpha * p
        r = r - alpha * Ap
        rr_new = float(r.ravel() @ r.ravel())
        p = r + (rr_new / rr) * p
        rr = rr_new
        report.iterations += 1
        report.residual_history.append(math.sqrt(rr) / bnorm)

    report.converged = bool(math.sqrt(rr) <= threshold)
    report.status = "converged" if report.converged else "max_iter"
    report.curvature_range = (lo, hi) if hi else None
    return x, report


def max_gap(x):
    """Largest gap between consecutive points, with ghosts ``-x_1`` and ``2 - x_r``."""
    x = np.sort(np.asarray(x, dtype=float))
    if x.size < 1:
        raise ValueError("need at least one point")
    ext = np.concatenate([[-x[0]], x, [2.0 - x[-1]]])
    return float(np.max(np.diff(ext)))


def condition_bound(delta, M):
    """``((1 + delta M) / (1 - delta M))**2``, or ``None`` when ``delta M >= 1``."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    dm = delta * M
    if dm >= 1.0:
        return None
    return ((1.0 + dm) / (1.0 - dm)) ** 2


def _contraction(kappa):
    s = math.sqrt(kappa)
    return (s - 1.0) / (s + 1.0)


def cg_error_predictor(kappa, e0, n):
    """A priori CG error bound ``2 kappa q**n e0`` with ``q = (sqrt(k)-1)/(sqrt(k)+1)``.

    ``n`` may be an integer or an array of iteration indices.
    """
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    q = _contraction(kappa)
    return 2.0 * kappa * np.power(q, n) * e0


def predicted_iterations(kappa, tol):
    """Smallest ``n`` with ``2 kappa q**n <= tol``.

    Started from zero, this also bounds the relative residual of CG, since
    ``||r_n|| / ||b|| <= sqrt(kappa) ||e_n||_A / ||e_0||_A``.
    """
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    if 2.0 * kappa <= tol:
        return 0
    q = _contraction(kappa)
    if q == 0.0:
        return 1
    return max(1, math.ceil(math.log(tol / (2.0 * kappa)) / math.log(q)))


def check_adjoint(apply_v, apply_vt, n_rows, n_cols, rng=None, rtol=1e-10):
    """Verify ``<V x, y> = <x, V^T y>`` on random vectors."""
    rng = np.random.default_rng(0) if rng is None else rng
    x = rng.standard_normal(n_cols)
    y = rng.standard_normal(n_rows)
    vx = np.asarray(apply_v(x))
    vty = np.asarray(apply_vt(y))
    lhs, rhs = float(vx @ y), float(x @ vty)
    scale = np.linalg.norm(vx) * np.linalg.norm(y) + np.linalg.norm(x) * np.linalg.norm(vty)
    if abs(lhs - rhs) > rtol * max(scale, 1e-300):
        raise AdjointMismatchError(
            f"<Vx, y> = {lhs:.15e} but <x, V^T y> = {rhs:.15e}")


def lsqr_solve(apply_v: Callable, apply_vt: Callable, s_w, n_cols,
               cfg: Optional[SolverConfig] = None):
    """Minimize ``||V c - s_w||`` without forming ``V^T V``.

    ``apply_v`` maps coefficients (length ``n_cols``) to samples and
    ``apply_vt`` is its adjoint; the pair is checked for consistency first.
    The report's single residual entry is the relative normal-equation
    residual ``||V^T (s_w - V c)|| / ||V^T s_w||``.
    """
    cfg = cfg or SolverConfig()
    s_w = np.asarray(s_w, dtype=float)
    m = s_w.size
    check_adjoint(apply_v, apply_vt, m, n_cols)
    report = SolveReport()
    if not np.any(s_w):
        report.converged = True
        report.status = "zero_rhs"
        report.residual_history = [0.0]
        return np.zeros(n_cols), report

    op = scipy.sparse.linalg.LinearOperator(
        (m, n_cols), matvec=apply_v, rmatvec=apply_vt, dtype=float)
    x0 = None if cfg.x0 is None else np.asarray(cfg.x0, dtype=float)
    # LSQR's own tolerances are relative to ||V|| ||r||; go well below tol
    inner = min(cfg.tol, 1e-10)
    res = scipy.sparse.linalg.lsqr(
        op, s_w, atol=inner, btol=inner, conlim=1e12,
        iter_lim=max(cfg.iteration_limit(n_cols), 50), x0=x0)
    x, istop, itn = res[0], res[1], res[2]
    g = np.linalg.norm(apply_vt(s_w - apply_v(x)))
    g0 = np.linalg.norm(apply_vt(s_w))
    report.iterations = int(itn)
    report.residual_history = [float(g / g0) if g0 else 0.0]
    report.converged = bool(istop in (0, 1, 2, 4, 5))
    report.status = {7: "max_iter", 3: "ill_conditioned", 6: "ill_conditioned"}.get(
        istop, "converged")
    return x, report
