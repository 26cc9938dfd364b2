import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from cosapprox.dct import (dct1, dct1_matrix, dct1_transpose, dct2d,
                           dct2d_transpose, edge_scaling)


def reference_dct1(x):
    # entry-by-entry definition with compensated summation
    n = len(x)
    N = n - 1
    out = []
    for k in range(n):
        e = 1.0 if k in (0, N) else 2.0
        s = math.fsum(x[l] * math.cos(math.pi * ((k * l) % (2 * N)) / N) for l in range(n))
        out.append(e * s / math.sqrt(2 * N))
    return np.array(out)


finite = st.floats(-1e3, 1e3, allow_nan=False)
signals = st.integers(2, 70).flatmap(lambda n: arrays(float, n, elements=finite))


def test_two_point_by_hand():
    np.testing.assert_allclose(dct1([1.0, 0.0]), [1 / math.sqrt(2)] * 2, atol=1e-15)


def test_three_ones_by_hand():
    np.testing.assert_allclose(dct1([1.0, 1.0, 1.0]), [1.5, 0.0, 0.5], atol=1e-15)


def test_transpose_of_unit_vector_n3():
    # column 0 of C^T is row 0 of C: e_0 / sqrt(4) * cos(0) = 1/2 for all l
    np.testing.assert_allclose(dct1_transpose([1.0, 0.0, 0.0]), [0.5, 0.5, 0.5], atol=1e-15)


def test_two_point_transform_is_symmetric():
    np.testing.assert_allclose(dct1_transpose([1.0, 0.0]), dct1([1.0, 0.0]), atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 8, 9, 17, 33])
def test_matrix_oracle_matches_reference(n, rng):
    x = rng.standard_normal(n)
    np.testing.assert_allclose(dct1_matrix(n) @ x, reference_dct1(list(x)), rtol=0, atol=1e-13 * np.abs(x).sum())


@given(signals)
def test_fast_matches_reference(x):
    ref = reference_dct1(list(x))
    scale = max(np.abs(x).sum(), 1e-300)
    assert np.max(np.abs(dct1(x) - ref)) <= 1e-13 * scale


@given(signals)
def test_involution(x):
    assert np.max(np.abs(dct1(dct1(x)) - x)) <= 1e-12 * max(np.abs(x).max(), 1e-300)


@given(signals)
def test_transpose_is_adjoint(x):
    n = x.size
    y = np.cos(np.arange(n) * 1.3)
    assert abs(dct1(x) @ y - x @ dct1_transpose(y)) <= 1e-12 * (np.abs(x).sum() * n + 1)


@pytest.mark.parametrize("n", [2, 3, 6, 17])
def test_transpose_equals_scaled_similarity(n):
    C = dct1_matrix(n)
    D = np.diag(edge_scaling(n))
    np.testing.assert_allclose(C.T, D @ C @ np.linalg.inv(D), atol=1e-14)
    cols = np.stack([dct1_transpose(e) for e in np.eye(n)], axis=1)
    np.testing.assert_allclose(cols, C.T, atol=1e-14)


def test_axis_argument(rng):
    X = rng.standard_normal((5, 7))
    np.testing.assert_allclose(dct1(X, axis=0), dct1_matrix(5) @ X, atol=1e-13)
    np.testing.assert_allclose(dct1(X, axis=1), X @ dct1_matrix(7).T, atol=1e-13)


def test_2d_ones_against_quadruple_sum():
    X = np.ones((2, 2))
    ref = np.zeros((2, 2))
    for k in range(2):
        for l in range(2):
            ref[k, l] = 0.5 * sum(math.cos(math.pi * k * a) * math.cos(math.pi * l * b)
                                  for a in range(2) for b in range(2))
    np.testing.assert_allclose(dct2d(X), ref, atol=1e-15)
    np.testing.assert_allclose(dct2d(X), [[2.0, 0.0], [0.0, 0.0]], atol=1e-15)


def test_2d_involution_and_separability(rng):
    X = rng.standard_normal((9, 17))
    np.testing.assert_allclose(dct2d(dct2d(X)), X, atol=1e-13)
    np.testing.assert_allclose(dct2d(X), dct1_matrix(9) @ X @ dct1_matrix(17).T, atol=1e-13)
    np.testing.assert_allclose(dct2d_transpose(X), dct1_matrix(9).T @ X @ dct1_matrix(17), atol=1e-13)


@pytest.mark.parametrize("bad", [[1.0], [], [1.0, np.nan], [np.inf, 0.0]])
def test_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        dct1(bad)


def test_2d_rejects_thin_input():
    with pytest.raises(ValueError):
        dct2d(np.ones((1, 4)))
    with pytest.raises(ValueError):
        dct2d(np.ones(4))
