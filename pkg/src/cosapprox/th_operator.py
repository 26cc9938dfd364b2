"""Scaled Toeplitz+Hankel normal matrices and their fast products.

In 1D the normal matrix of the weighted cosine least-squares problem is
``A = D (T + H) D`` with ``T[k, l] = a[|k - l|]``, ``H[k, l] = a[k + l]``,
``a_k = 1/2 sum_j w_j cos(pi k x_j)`` and ``D = diag(1/sqrt(2), 1, ..., 1)``.
``T + H`` is the leading block of a larger Toeplitz+Hankel matrix that the
DCT-I diagonalizes, which gives an O(M log M) product.

In 2D the coefficients are stored as a ``(Mx + 1, My + 1)`` array ``c[k, l]``
(``k`` the x-degree) and stacked with ``k`` running fastest, so the outer
blocks of ``A`` are indexed by the y-degree ``l``.
"""

import functools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .dct import dct1_transpose, dct2d_transpose, edge_scaling
from .nudct import cosine_sums, cosine_sums_2d

SQRT1_2 = 1.0 / math.sqrt(2.0)

DENSE_MAX_ORDER = 4096


def padded_length(M):
    """Smallest ``2**n + 1`` that holds the augmented matrix of order ``2M + 1``."""
    need = 2 * int(M) + 1
    n = 1
    while n + 1 < need:
        n *= 2
    return n + 1


def toeplitz_plus_hankel(a):
    """``toep(a) + J toep(J a)``, the form the DCT-I diagonalizes."""
    a = np.asarray(a, dtype=float)
    J = np.eye(a.size)[::-1]
    return scipy.linalg.toeplitz(a) + J @ scipy.linalg.toeplitz(a[::-1])


def block_toeplitz_plus_hankel(blocks):
    """Block matrix whose block pattern over ``blocks[0..n-1]`` is the 1D form.

    ``blocks`` has shape ``(n, m, m)``; block ``(p, q)`` is
    ``blocks[|p - q|] + blocks[n - 1 - |n - 1 - p - q|]``.
    """
    blocks = np.asarray(blocks, dtype=float)
    n, m, _ = blocks.shape
    p, q = np.indices((n, n))
    idx_t = np.abs(p - q)
    idx_h = n - 1 - np.abs(n - 1 - p - q)
    out = blocks[idx_t] + blocks[idx_h]
    return out.transpose(0, 2, 1, 3).reshape(n * m, n * m)


def _check_dense_order(order, max_order):
    if order > max_order:
        raise ValueError(
            f"refusing to materialize a dense matrix of order {order} "
            f"(max_order={max_order})")


def _th_first_column(gen, n):
    # first column of the augmented T + H: 2 * [a_0, ..., a_2M, 0, ...]
    col = np.zeros(n)
    col[:gen.size] = 2.0 * gen
    return col


@dataclass(frozen=True)
class THOperator:
    """Implicit ``A = D (T + H) D`` of order ``M + 1``.

    ``gen`` holds ``a_0, ..., a_{2M+1}``; only ``a_0..a_{2M}`` enter ``A``.
    """

    gen: np.ndarray
    padded_len: int = None
    _spectrum: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        gen = np.array(self.gen, dtype=float)
        if gen.ndim != 1 or gen.size < 2 or gen.size % 2:
            raise ValueError("generating sequence must have even length 2M + 2")
        if not np.all(np.isfinite(gen)):
            raise ValueError("generating sequence must be finite")
        gen.setflags(write=False)
        object.__setattr__(self, "gen", gen)
        M = gen.size // 2 - 1
        n = padded_length(M) if self.padded_len is None else int(self.padded_len)
        if n < max(2, 2 * M + 1):
            raise ValueError(f"padded_len must be >= {max(2, 2 * M + 1)}, got {n}")
        object.__setattr__(self, "padded_len", n)
        spec = dct1_transpose(_th_first_column(gen[:2 * M + 1], n))
        spec.setflags(write=False)
        object.__setattr__(self, "_spectrum", spec)

    @property
    def degree(self):
        return self.gen.size // 2 - 1

    @property
    def shape(self):
        return (self.degree + 1, self.degree + 1)

    def matvec(self, x):
        """``A @ x`` in O(M log M) via the augmented DCT-I embedding."""
        x = np.asarray(x, dtype=float)
        m1 = self.degree + 1
        if x.shape != (m1,):
            raise ValueError(f"expected vector of length {m1}, got shape {x.shape}")
        n = self.padded_len
        xa = np.zeros(n)
        xa[:m1] = x
        xa[0] *= SQRT1_2
        xa *= edge_scaling(n)
        ya = math.sqrt((n - 1) / 2.0) * dct1_transpose(self._spectrum * dct1_transpose(xa))
        y = ya[:m1]
        y[0] *= SQRT1_2
        return y

    def todense(self, max_order=DENSE_MAX_ORDER):
        """Materialize ``D (T + H) D``; O(M^2), meant as an oracle."""
        m1 = self.degree + 1
        _check_dense_order(m1, max_order)
        k = np.arange(m1)
        a = self.gen
        th = a[np.abs(k[:, None] - k[None, :])] + a[k[:, None] + k[None, :]]
        d = np.ones(m1)
        d[0] = SQRT1_2
        return d[:, None] * th * d[None, :]

    def leading(self, M):
        """Operator of the degree-``M`` subproblem (leading principal block)."""
        if not 0 <= M <= self.degree:
            raise ValueError("sub-degree out of range")
        return THOperator(self.gen[:2 * M + 2])


def _check_samples(x, w, s):
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    s = np.asarray(s, dtype=float)
    if x.ndim != 1 or w.shape != x.shape or s.shape != x.shape:
        raise ValueError("points, weights and values must be 1D of equal length")
    if x.size == 0:
        raise ValueError("need at least one sample")
    if not np.all(w > 0):
        raise ValueError("weights must be positive")
    return x, w, s


def assemble_1d(x, weights, values, M, padded_len=None, method="direct", tol=1e-7):
    """Generating sequence and right-hand side ``b = V^T s_w`` for degree ``M``.

    Returns ``(THOperator, b)``.
    """
    x, w, s = _check_samples(x, weights, values)
    M = int(M)
    if M < 0:
        raise ValueError("degree must be non-negative")
    gen = 0.5 * cosine_sums(x, w, 2 * M + 1, method=method, tol=tol)
    b = cosine_sums(x, w * s, M, method=method, tol=tol)
    b[0] *= SQRT1_2
    return THOperator(gen, padded_len), b


def dense_1d(op, max_order=DENSE_MAX_ORDER):
    return op.todense(max_order)


def matvec_1d(op, x):
    return op.matvec(x)


def _tensor_th_apply(spec, X, nx, ny):
    # 2D analogue of the 1D three-transform product on an nx x ny array
    d1 = np.outer(edge_scaling(nx), edge_scaling(ny))
    scale = math.sqrt((nx - 1) / 2.0) * math.sqrt((ny - 1) / 2.0)
    return scale * dct2d_transpose(spec * dct2d_transpose(d1 * X))


@dataclass(frozen=True)
class BlockTHOperator:
    """Implicit 2D normal matrix with generating array ``gen[k, l]``.

    ``gen`` has shape ``(2Mx + 2, 2My + 2)`` and holds
    ``1/4 sum_j w_j cos(pi k x_j) cos(pi l y_j)``.
    """

    gen: np.ndarray
    padded_shape: tuple = None
    _spectrum: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        gen = np.array(self.gen, dtype=float)
        if gen.ndim != 2 or gen.shape[0] % 2 or gen.shape[1] % 2 or gen.size == 0:
            raise ValueError("generating array must have shape (2Mx + 2, 2My + 2)")
        if not np.all(np.isfinite(gen)):
            raise ValueError("generating array must be finite")
        gen.setflags(write=False)
        object.__setattr__(self, "gen", gen)
        Mx, My = self.degrees
        if self.padded_shape is None:
            shape = (padded_length(Mx), padded_length(My))
        else:
            shape = tuple(int(n) for n in self.padded_shape)
        if shape[0] < max(2, 2 * Mx + 1) or shape[1] < max(2, 2 * My + 1):
            raise ValueError(f"padded_shape {shape} too small for degrees {(Mx, My)}")
        object.__setattr__(self, "padded_shape", shape)
        col = np.zeros(shape)
        col[:2 * Mx + 1, :2 * My + 1] = 4.0 * gen[:2 * Mx + 1, :2 * My + 1]
        spec = dct2d_transpose(col)
        spec.setflags(write=False)
        object.__setattr__(self, "_spectrum", spec)

    @property
    def degrees(self):
        return (self.gen.shape[0] // 2 - 1, self.gen.shape[1] // 2 - 1)

    @property
    def size(self):
        Mx, My = self.degrees
        return (Mx + 1) * (My + 1)

    @property
    def shape(self):
        return (self.size, self.size)

    def _as_array(self, x):
        Mx, My = self.degrees
        x = np.asarray(x, dtype=float)
        if x.shape == (Mx + 1, My + 1):
            return x, False
        if x.shape == (self.size,):
            return x.reshape((Mx + 1, My + 1), order="F"), True
        raise ValueError(
            f"expected shape {(Mx + 1, My + 1)} or ({self.size},), got {x.shape}")

    def matvec(self, x):
        """``A @ x`` through the block-augmented 2D DCT-I embedding.

        ``x`` is either the stacked vector (x-degree fastest) or the
        coefficient array; the result has the same layout.
        """
        X, flat = self._as_array(x)
        if _tensor_formula_verified():
            Y = self._matvec_tensor(X)
        else:
            Y = self._matvec_blockwise(X)
        return Y.ravel(order="F") if flat else Y

    def _matvec_tensor(self, X):
        Mx, My = self.degrees
        nx, ny = self.padded_shape
        Xa = np.zeros((nx, ny))
        Xa[:Mx + 1, :My + 1] = X
        Xa[0, 0] *= SQRT1_2
        Y = _tensor_th_apply(self._spectrum, Xa, nx, ny)[:Mx + 1, :My + 1]
        Y[0, 0] *= SQRT1_2
        return Y

    def _matvec_blockwise(self, X):
        # fallback: one 1D Toeplitz+Hankel product per block pair
        Mx, My = self.degrees
        G = self.gen
        Xs = X.copy()
        Xs[0, 0] *= SQRT1_2
        Y = np.zeros_like(Xs)
        nx = padded_length(Mx)
        d1 = edge_scaling(nx)
        for l in range(My + 1):
            for lp in range(My + 1):
                g = G[:2 * Mx + 1, l + lp] + G[:2 * Mx + 1, abs(l - lp)]
                spec = dct1_transpose(_th_first_column(g, nx))
                xa = np.zeros(nx)
                xa[:Mx + 1] = Xs[:, lp]
                ya = math.sqrt((nx - 1) / 2.0) * dct1_transpose(spec * dct1_transpose(d1 * xa))
                Y[:, l] += ya[:Mx + 1]
        Y[0, 0] *= SQRT1_2
        return Y

    def todense(self, max_order=DENSE_MAX_ORDER):
        """Materialize ``A`` in the stacked ordering (x-degree fastest)."""
        Mx, My = self.degrees
        _check_dense_order(self.size, max_order)
        G = self.gen
        k = np.arange(Mx + 1)
        l = np.arange(My + 1)
        ks = (k[:, None] + k[None, :])[:, None, :, None]
        kd = np.abs(k[:, None] - k[None, :])[:, None, :, None]
        ls = (l[:, None] + l[None, :])[None, :, None, :]
        ld = np.abs(l[:, None] - l[None, :])[None, :, None, :]
        A4 = G[ks, ls] + G[kd, ls] + G[ks, ld] + G[kd, ld]  # [k, l, k', l']
        eps = np.ones((Mx + 1, My + 1))
        eps[0, 0] = SQRT1_2
        A4 = eps[:, :, None, None] * A4 * eps[None, None, :, :]
        return A4.transpose(1, 0, 3, 2).reshape(self.size, self.size)


def assemble_2d(x, y, weights, values, Mx, My, padded_shape=None):
    """Generating array and stacked right-hand side for degrees ``(Mx, My)``.

    Returns ``(BlockTHOperator, b)`` with ``b`` of shape ``(Mx + 1, My + 1)``.
    """
    x, w, s = _check_samples(x, weights, values)
    y = np.asarray(y, dtype=float)
    if y.shape != x.shape:
        raise ValueError("x and y must have equal length")
    Mx, My = int(Mx), int(My)
    if Mx < 0 or My < 0:
        raise ValueError("degrees must be non-negative")
    gen = 0.25 * cosine_sums_2d(x, y, w, 2 * Mx + 1, 2 * My + 1)
    b = cosine_sums_2d(x, y, w * s, Mx, My)
    b[0, 0] *= SQRT1_2
    return BlockTHOperator(gen, padded_shape), b


def dense_2d(op, max_order=DENSE_MAX_ORDER):
    return op.todense(max_order)


def matvec_2d(op, x):
    return op.matvec(x)


@functools.lru_cache(maxsize=None)
def _tensor_formula_verified():
    """Check the tensor-product fast product against the dense matrix once."""
    rng = np.random.default_rng(20240607)
    for Mx, My in ((2, 3), (4, 1)):
        op = BlockTHOperator(rng.standard_normal((2 * Mx + 2, 2 * My + 2)))
        X = rng.standard_normal((Mx + 1, My + 1))
        ref = op.todense() @ X.ravel(order="F")
        got = op._matvec_tensor(X).ravel(order="F")
        if np.linalg.norm(got - ref) > 1e-10 * max(1.0, np.linalg.norm(ref)):
            return False
    return True
