"""Synthetic gridding experiments, the periodic baseline and grid error metrics."""

import json
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .approx import SampleSet, make_samples


@dataclass
class GridSpec:
    """Uniform grid with nodes ``l / L``, ``l = 0..L``, on every axis."""

    dim: int = 2
    L: int = 150

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("grid dimension must be 1 or 2")
        if self.L < 1:
            raise ValueError("grid resolution L must be >= 1")

    @property
    def shape(self):
        return (self.L + 1,) * self.dim

    def axis(self):
        return np.arange(self.L + 1) / self.L

    def mesh(self):
        t = self.axis()
        if self.dim == 1:
            return (t,)
        return tuple(np.meshgrid(t, t, indexing="ij"))


@dataclass
class GridField:
    """Values on a :class:`GridSpec`, indexed ``[x, y]`` in 2D."""

    values: np.ndarray
    grid: GridSpec
    provenance: str = "fit"
    lo: Optional[np.ndarray] = None
    hi: Optional[np.ndarray] = None
    error: Optional[float] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values shape {self.values.shape} != grid {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")
        d = self.grid.dim
        self.lo = np.zeros(d) if self.lo is None else np.asarray(self.lo, dtype=float)
        self.hi = np.ones(d) if self.hi is None else np.asarray(self.hi, dtype=float)

    def axes(self):
        t = self.grid.axis()
        return tuple(self.lo[i] + (self.hi[i] - self.lo[i]) * t for i in range(self.grid.dim))


def relative_error(fit, reference):
    """``||f(grid) - f_a(grid)||_2 / ||f(grid)||_2`` over all grid nodes."""
    a = fit.values if isinstance(fit, GridField) else np.asarray(fit, dtype=float)
    f = reference.values if isinstance(reference, GridField) else np.asarray(reference, dtype=float)
    if isinstance(fit, GridField) and isinstance(reference, GridField):
        if fit.grid != reference.grid or not (
                np.allclose(fit.lo, reference.lo) and np.allclose(fit.hi, reference.hi)):
            raise ValueError("fit and reference live on different grids")
    if a.shape != f.shape:
        raise ValueError(f"grid mismatch: {a.shape} vs {f.shape}")
    nf = np.linalg.norm(f)
    if nf == 0.0:
        raise ValueError("reference field has zero norm")
    return float(np.linalg.norm(f - a) / nf)


@dataclass
class Anomaly:
    center: tuple
    extent: tuple
    amplitude: float

    def __post_init__(self):
        self.center = tuple(float(v) for v in self.center)
        self.extent = tuple(float(v) for v in self.extent)
        self.amplitude = float(self.amplitude)
        if len(self.center) != 2 or len(self.extent) != 2:
            raise ValueError("anomaly center and extent need two components")
        if min(self.extent) <= 0:
            raise ValueError("anomaly extent must be positive")


def _default_anomalies():
    # two bodies reach past the boundary so the field is far from periodic
    return [
        Anomaly((0.30, 0.35), (0.18, 0.14), 1.0),
        Anomaly((0.80, 0.85), (0.20, 0.22), -0.7),
        Anomaly((0.95, 0.15), (0.22, 0.18), 0.6),
    ]


@dataclass
class ExperimentSpec:
    """A reproducible synthetic gridding experiment on the unit square.

    ``generator`` is ``"gaussian"`` (anisotropic Gaussian bumps with standard
    deviations ``extent``) or ``"box"`` (plateaus of half-widths ``extent``
    with tanh edges of width ``softness``).
    """

    generator: str = "gaussian"
    anomalies: list = field(default_factory=_default_anomalies)
    r: int = 496
    noise_fraction: float = 0.05
    seed: int = 0
    grid_L: int = 150
    softness: float = 0.05

    def __post_init__(self):
        if self.generator not in ("gaussian", "box"):
            raise ValueError(f"unknown generator {self.generator!r}")
        self.anomalies = [a if isinstance(a, Anomaly) else Anomaly(**a) for a in self.anomalies]
        if self.r < 1:
            raise ValueError("sample count r must be >= 1")
        if self.noise_fraction < 0:
            raise ValueError("noise_fraction must be >= 0")
        if self.softness <= 0:
            raise ValueError("softness must be positive")

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))

    def to_json(self):
        return json.dumps(asdict(self), indent=2)

    def field(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast(x, y).shape)
        for a in self.anomalies:
            (cx, cy), (sx, sy) = a.center, a.extent
            if self.generator == "gaussian":
                out += a.amplitude * np.exp(-0.5 * (((x - cx) / sx) ** 2 + ((y - cy) / sy) ** 2))
            else:
                h = self.softness
                px = np.tanh((x - cx + sx) / h) - np.tanh((x - cx - sx) / h)
                py = np.tanh((y - cy + sy) / h) - np.tanh((y - cy - sy) / h)
                out += a.amplitude * 0.25 * px * py
        return out


def add_noise(values, fraction, rng):
    """Gaussian noise rescaled so that ``||noise|| = fraction * ||values||`` exactly."""
    values = np.asarray(values, dtype=float)
    noise = rng.standard_normal(values.shape)
    nn = np.linalg.norm(noise)
    target = fraction * np.linalg.norm(values)
    if nn == 0.0 or target == 0.0:
        return values.copy(), np.zeros_like(values)
    noise *= target / nn
    return values + noise, noise


def synth_experiment(spec):
    """Draw samples of the synthetic field and tabulate the clean reference.

    Returns ``(SampleSet, GridField)``; the sample set has uniform weights.
    """
    rng = np.random.default_rng(spec.seed)
    pts = rng.random((spec.r, 2))
    clean = spec.field(pts[:, 0], pts[:, 1])
    noisy, _ = add_noise(clean, spec.noise_fraction, rng)
    grid = GridSpec(2, spec.grid_L)
    X, Y = grid.mesh()
    ref = GridField(spec.field(X, Y), grid, provenance="reference")
    return make_samples(pts, noisy, weights="uniform"), ref


def _periodic_basis(t, K):
    # real form of {exp(2 pi i k t)}, |k| <= K: 2K + 1 functions
    k = np.arange(1, K + 1)
    arg = 2 * np.pi * np.multiply.outer(t, k)
    return np.concatenate([np.ones((t.size, 1)), np.cos(arg), np.sin(arg)], axis=1)


@dataclass
class PeriodicPoly:
    """Real trigonometric polynomial of period one, frequencies ``|k| <= K``."""

    coeffs: np.ndarray
    K: tuple
    rank: int

    @property
    def dof(self):
        return int(np.prod([2 * k + 1 for k in self.K]))

    def at_unit(self, x, y=None):
        bx = _periodic_basis(np.atleast_1d(np.asarray(x, dtype=float)), self.K[0])
        if len(self.K) == 1:
            return bx @ self.coeffs
        by = _periodic_basis(np.atleast_1d(np.asarray(y, dtype=float)), self.K[1])
        return np.einsum("jk,kl,jl->j", bx, self.coeffs, by)

    def on_grid(self, L):
        t = np.arange(L + 1) / L
        b = [_periodic_basis(t, k) for k in self.K]
        if len(self.K) == 1:
            return b[0] @ self.coeffs
        return b[0] @ self.coeffs @ b[1].T


class RankDeficientError(ArithmeticError):
    pass


def periodic_fit(samples: SampleSet, K, allow_rank_deficient=False):
    """Dense weighted least squares in the period-one exponential basis.

    ``K`` is the frequency cutoff (an int, or a pair in 2D), giving
    ``2K + 1`` real degrees of freedom per axis.
    """
    K = (int(K),) * samples.dim if np.isscalar(K) else tuple(int(k) for k in K)
    if len(K) != samples.dim or min(K) < 0:
        raise ValueError("one non-negative cutoff per dimension required")
    if samples.dim == 1:
        B = _periodic_basis(samples.x, K[0])
    else:
        bx = _periodic_basis(samples.x, K[0])
        by = _periodic_basis(samples.y, K[1])
        # column index ix + nx * iy
        B = (bx[:, :, None] * by[:, None, :]).reshape(samples.r, -1, order="F")
    if B.shape[1] > samples.r:
        raise ValueError(f"{B.shape[1]} coefficients need at least as many samples")
    sw = np.sqrt(samples.weights)
    c, _, rank, _ = np.linalg.lstsq(sw[:, None] * B, sw * samples.values, rcond=None)
    if rank < B.shape[1] and not allow_rank_deficient:
        raise RankDeficientError(f"periodic design matrix has rank {rank} < {B.shape[1]}")
    if samples.dim == 2:
        c = c.reshape((2 * K[0] + 1, 2 * K[1] + 1), order="F")
    return PeriodicPoly(c, K, int(rank))


def periodic_baseline_fit(samples, K, L, reference=None):
    """Fit the periodic baseline and tabulate it on the ``L``-grid.

    Returns ``(GridField, error)``; ``error`` is None without a reference.
    """
    poly = periodic_fit(samples, K)
    field_ = GridField(poly.on_grid(L), GridSpec(samples.dim, L), "periodic",
                       samples.lo, samples.hi)
    if reference is not None:
        field_.error = relative_error(field_, reference)
    return field_, field_.error
