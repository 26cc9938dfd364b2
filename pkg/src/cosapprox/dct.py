"""Type-I discrete cosine transforms (non-unitary convention, C @ C = I).

The transform of length ``n`` is

    [C x]_k = e_k / sqrt(2n - 2) * sum_l x_l cos(pi k l / (n - 1)),

with ``e_k = 1`` for ``k in {0, n-1}`` and ``e_k = 2`` otherwise. It is
evaluated through the even extension of length ``2n - 2`` and a real FFT.
"""

import numpy as np


def _check_signal(x, axis=-1):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        raise ValueError("DCT-I input must be at least one-dimensional")
    if x.shape[axis] < 2:
        raise ValueError(
            f"DCT-I needs length >= 2 along axis {axis}, got {x.shape[axis]}")
    if not np.all(np.isfinite(x)):
        raise ValueError("DCT-I input contains non-finite values")
    return x


def edge_scaling(n):
    """Diagonal of ``D1 = diag(2, 1, ..., 1, 2)`` of order ``n``."""
    if n < 1:
        raise ValueError("order must be positive")
    d = np.ones(n)
    d[0] = d[-1] = 2.0
    return d


def _cosine_sum(x, axis):
    # S_k = sum_l x_l cos(pi k l / N), via rfft of the even extension.
    x = np.moveaxis(x, axis, -1)
    n = x.shape[-1]
    ext = np.concatenate([x, x[..., -2:0:-1]], axis=-1)
    s = np.fft.rfft(ext, axis=-1).real
    # endpoints appear once in the extension, interior points twice
    s = 0.5 * (s + x[..., :1] + ((-1.0) ** np.arange(n)) * x[..., -1:])
    return np.moveaxis(s, -1, axis)


def _dct1(x, axis):
    n = x.shape[axis]
    e = 2.0 / edge_scaling(n)
    shape = [1] * x.ndim
    shape[axis] = n
    return _cosine_sum(x, axis) * (e / np.sqrt(2 * n - 2)).reshape(shape)


def dct1(x, axis=-1):
    """Apply ``C_n`` along ``axis`` (length ``n >= 2``)."""
    x = _check_signal(x, axis)
    return _dct1(x, axis)


def dct1_transpose(x, axis=-1):
    """Apply ``C_n^T = D1 C_n D1^{-1}`` along ``axis``."""
    x = _check_signal(x, axis)
    n = x.shape[axis]
    shape = [1] * x.ndim
    shape[axis] = n
    d1 = edge_scaling(n).reshape(shape)
    return d1 * _dct1(x / d1, axis)


def dct2d(x):
    """Separable 2D DCT-I: columns (length ``m``) then rows (length ``n``)."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValueError("dct2d expects a 2D array")
    x = _check_signal(x, 0)
    _check_signal(x, 1)
    return _dct1(_dct1(x, 0), 1)


def dct2d_transpose(x):
    """Transpose of :func:`dct2d`, i.e. ``C_m^T X C_n``."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValueError("dct2d_transpose expects a 2D array")
    return dct1_transpose(dct1_transpose(x, 0), 1)


def dct1_matrix(n):
    """Dense ``C_n`` built from the definition. Test/oracle use only."""
    if n < 2:
        raise ValueError("DCT-I order must be >= 2")
    k = np.arange(n)
    e = 2.0 / edge_scaling(n)
    # exact integer range reduction keeps the oracle accurate for large n
    kl = np.outer(k, k) % (2 * (n - 1))
    return e[:, None] * np.cos(np.pi * kl / (n - 1)) / np.sqrt(2 * n - 2)
