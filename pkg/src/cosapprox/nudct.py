"""Nonuniform cosine sums and cosine-polynomial evaluation.

``cosine_sums`` returns raw sums ``g_k = sum_j v_j cos(pi k x_j)``; the
``1/sqrt(2)`` weighting of the constant basis function is applied only by the
evaluation routines and by the operator assembly.
"""

import math
import warnings

import numpy as np

from .dct import dct1, dct2d, edge_scaling

SQRT2 = math.sqrt(2.0)

# Bounds the size of the temporary cosine tables used by direct summation.
_CHUNK = 1 << 20


class OutsideDomainWarning(UserWarning):
    """Evaluation points lie outside [0, 1]; values follow the even extension."""


def _as_points(x):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("points must be a 1D sequence")
    if not np.all(np.isfinite(x)):
        raise ValueError("points must be finite")
    return x


def _as_values(v, r):
    v = np.asarray(v, dtype=float)
    if v.shape != (r,):
        raise ValueError(f"expected {r} values, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("values must be finite")
    return v


def _check_coeffs(c, ndim):
    c = np.asarray(c, dtype=float)
    if c.ndim != ndim or c.size == 0:
        raise ValueError(f"coefficients must be a non-empty {ndim}D array")
    if not np.all(np.isfinite(c)):
        raise ValueError("coefficients must be finite")
    return c


def _warn_outside(*coords):
    for t in coords:
        if t.size and (t.min() < 0.0 or t.max() > 1.0):
            warnings.warn(
                "evaluation points outside [0, 1]", OutsideDomainWarning,
                stacklevel=3)
            return


def _cos_table(k, x):
    return np.cos(np.pi * np.multiply.outer(k, x))


def cosine_sums(x, v, K, start=0, method="direct", tol=1e-7,
                oversampling=2.0, half_width=None):
    """Cosine moments ``g_k = sum_j v_j cos(pi k x_j)`` for ``k = start..K``.

    Parameters
    ----------
    x : (r,) array
        Sample locations (normally in [0, 1]).
    v : (r,) array
        Values attached to the samples.
    K : int
        Largest frequency, ``K >= start >= 0``.
    method : {"direct", "fast"}
        ``"direct"`` sums exactly in O(K r). ``"fast"`` uses Gaussian
        gridding on an oversampled uniform grid plus an FFT, accurate to
        roughly ``tol`` relative to ``sum |v_j|``.
    oversampling, half_width : optional
        Grid oversampling factor and spreading half-width for ``"fast"``;
        ``half_width`` defaults to a value derived from ``tol``.

    Returns
    -------
    g : (K - start + 1,) array
    """
    x = _as_points(x)
    v = _as_values(v, x.size)
    K = int(K)
    start = int(start)
    if start < 0 or K < start:
        raise ValueError(f"need 0 <= start <= K, got start={start}, K={K}")
    if method == "fast":
        return _cosine_sums_gridded(x, v, K, tol, oversampling, half_width)[start:]
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")

    k = np.arange(start, K + 1)
    out = np.zeros(k.size)
    step = max(1, _CHUNK // max(1, x.size))
    for i in range(0, k.size, step):
        out[i:i + step] = _cos_table(k[i:i + step], x) @ v
    return out


def _cosine_sums_gridded(x, v, K, tol, oversampling, half_width):
    # Each cosine is half of two exponentials at +-pi x_j, so this is a
    # type-1 nonuniform FFT on the 2*pi-periodic circle (Greengard & Lee).
    if oversampling <= 1.0:
        raise ValueError("oversampling must exceed 1")
    R = float(oversampling)
    if half_width is None:
        rate = math.pi * (R - 1.0) / (R - 0.5)
        half_width = int(math.ceil(-math.log(tol) / rate)) + 1
    msp = int(half_width)
    if msp < 1:
        raise ValueError("half_width must be >= 1")
    # the grid must be wide enough to hold a full spreading stencil
    nmodes = max(2 * K + 2, 4 * msp)
    mr = int(math.ceil(R * nmodes))
    mr += mr % 2
    tau = math.pi * msp / (nmodes ** 2 * R * (R - 0.5))

    theta = np.concatenate([np.pi * x, -np.pi * x]) % (2 * np.pi)
    u = np.concatenate([v, v]) * 0.5
    h = 2 * np.pi / mr
    m0 = np.rint(theta / h).astype(np.int64)
    offs = np.arange(-msp, msp + 1)
    idx = m0[:, None] + offs[None, :]
    dist = idx * h - theta[:, None]
    kern = np.exp(-dist ** 2 / (4 * tau))
    grid = np.bincount((idx % mr).ravel(), weights=(u[:, None] * kern).ravel(),
                       minlength=mr)
    k = np.arange(K + 1)
    f_tau = np.fft.fft(grid)[:K + 1] / mr
    return (np.sqrt(np.pi / tau) * np.exp(k ** 2 * tau) * f_tau).real


def cosine_sums_2d(x, y, v, Kx, Ky):
    """Bivariate moments ``g[k, l] = sum_j v_j cos(pi k x_j) cos(pi l y_j)``."""
    x = _as_points(x)
    y = _as_points(y)
    if y.size != x.size:
        raise ValueError("x and y must have the same length")
    v = _as_values(v, x.size)
    Kx, Ky = int(Kx), int(Ky)
    if Kx < 0 or Ky < 0:
        raise ValueError("degrees must be non-negative")
    out = np.zeros((Kx + 1, Ky + 1))
    step = max(1, _CHUNK // max(1, Kx + Ky + 2))
    for i in range(0, x.size, step):
        sl = slice(i, i + step)
        cx = _cos_table(np.arange(Kx + 1), x[sl])
        cy = _cos_table(np.arange(Ky + 1), y[sl])
        out += (cx * v[sl]) @ cy.T
    return out


def _unscale(c):
    c = np.array(c, dtype=float)
    c.flat[0] /= SQRT2
    return c


def _fold(c, L, axis):
    # cos(pi k l / L) depends only on k mod 2L and is even about L
    K = c.shape[axis]
    if K <= L + 1:
        pad = [(0, 0)] * c.ndim
        pad[axis] = (0, L + 1 - K)
        return np.pad(c, pad)
    k = np.arange(K) % (2 * L)
    k = np.where(k > L, 2 * L - k, k)
    out = np.zeros(c.shape[:axis] + (L + 1,) + c.shape[axis + 1:])
    np.add.at(np.moveaxis(out, axis, 0), k, np.moveaxis(c, axis, 0))
    return out


def _grid_synthesis_1d(y, axis):
    # sum_k y_k cos(pi k l / L) = sqrt(2L) * D1/2 * (C y)_l
    n = y.shape[axis]
    shape = [1] * y.ndim
    shape[axis] = n
    scale = (np.sqrt(2.0 * (n - 1)) * edge_scaling(n) / 2.0).reshape(shape)
    return scale * dct1(y, axis=axis)


def uniform_grid(L):
    """The grid ``t_l = l / L`` for ``l = 0..L``."""
    L = int(L)
    if L < 1:
        raise ValueError("grid resolution L must be >= 1")
    return np.arange(L + 1) / L


def _uniform_resolution(t):
    if t.size < 2:
        return None
    L = t.size - 1
    if np.allclose(t, np.arange(L + 1) / L, rtol=0.0, atol=1e-14):
        return L
    return None


def eval_poly_grid(c, L):
    """Evaluate a 1D cosine polynomial at ``l / L``, ``l = 0..L``, in O(L log L)."""
    c = _check_coeffs(c, 1)
    L = int(L)
    if L < 1:
        raise ValueError("grid resolution L must be >= 1")
    return _grid_synthesis_1d(_fold(_unscale(c), L, 0), 0)


def eval_poly(c, t):
    """Evaluate ``p(t) = c_0/sqrt(2) + sum_k c_k cos(pi k t)``.

    Uniform grids ``l / L`` are routed through the DCT-I; anything else is
    summed directly. Points outside [0, 1] are evaluated by the same formula
    and raise :class:`OutsideDomainWarning`.
    """
    c = _check_coeffs(c, 1)
    t = _as_points(t)
    L = _uniform_resolution(t)
    if L is not None:
        return eval_poly_grid(c, L)
    _warn_outside(t)
    y = _unscale(c)
    k = np.arange(y.size)
    out = np.empty(t.size)
    step = max(1, _CHUNK // y.size)
    for i in range(0, t.size, step):
        out[i:i + step] = y @ _cos_table(k, t[i:i + step])
    return out


def eval_poly_2d_grid(c, Lx, Ly=None):
    """Evaluate a 2D cosine polynomial on the tensor grid ``(k/Lx, l/Ly)``.

    Returns an ``(Lx + 1, Ly + 1)`` array indexed ``[x, y]``.
    """
    c = _check_coeffs(c, 2)
    Ly = Lx if Ly is None else Ly
    Lx, Ly = int(Lx), int(Ly)
    if Lx < 1 or Ly < 1:
        raise ValueError("grid resolution must be >= 1")
    y = _fold(_fold(_unscale(c), Lx, 0), Ly, 1)
    n = np.array(y.shape)
    sx = np.sqrt(2.0 * (n[0] - 1)) * edge_scaling(n[0]) / 2.0
    sy = np.sqrt(2.0 * (n[1] - 1)) * edge_scaling(n[1]) / 2.0
    return np.outer(sx, sy) * dct2d(y)


def eval_poly_2d(c, x, y):
    """Evaluate a 2D cosine polynomial at the scattered points ``(x_j, y_j)``.

    ``c`` has shape ``(Mx + 1, My + 1)``; ``c[0, 0]`` carries the
    ``1/sqrt(2)`` scaling.
    """
    c = _check_coeffs(c, 2)
    x = _as_points(x)
    y = _as_points(y)
    if x.size != y.size:
        raise ValueError("x and y must have the same length")
    _warn_outside(x, y)
    cu = _unscale(c)
    kx = np.arange(c.shape[0])
    ky = np.arange(c.shape[1])
    out = np.empty(x.size)
    step = max(1, _CHUNK // (c.shape[0] + c.shape[1]))
    for i in range(0, x.size, step):
        sl = slice(i, i + step)
        cx = _cos_table(kx, x[sl])
        cy = _cos_table(ky, y[sl])
        out[sl] = np.einsum("kj,kl,lj->j", cx, cu, cy, optimize=True)
    return out
