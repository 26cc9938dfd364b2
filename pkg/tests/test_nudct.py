import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from cosapprox.nudct import (OutsideDomainWarning, cosine_sums, cosine_sums_2d,
                             eval_poly, eval_poly_2d, eval_poly_2d_grid,
                             eval_poly_grid, uniform_grid)


def fsum_moments(x, v, K):
    return np.array([math.fsum(vj * math.cos(math.pi * k * xj) for xj, vj in zip(x, v))
                     for k in range(K + 1)])


def fsum_moments_2d(x, y, v, Kx, Ky):
    return np.array([[math.fsum(vj * math.cos(math.pi * k * xj) * math.cos(math.pi * l * yj)
                                for xj, yj, vj in zip(x, y, v))
                      for l in range(Ky + 1)] for k in range(Kx + 1)])


def test_two_endpoints_by_hand():
    np.testing.assert_allclose(cosine_sums([0.0, 1.0], [1.0, 1.0], 2), [2.0, 0.0, 2.0], atol=1e-15)


def test_zero_frequency_is_plain_sum(rng):
    x, v = rng.random(17), rng.standard_normal(17)
    np.testing.assert_allclose(cosine_sums(x, v, 0), [math.fsum(v)], rtol=1e-14)


def test_random_against_compensated_sum(rng):
    x, v = rng.random(50), rng.standard_normal(50)
    ref = fsum_moments(x, v, 30)
    assert np.max(np.abs(cosine_sums(x, v, 30) - ref)) <= 1e-13 * np.abs(v).sum()


def test_start_offset_gives_tail(rng):
    x, v = rng.random(20), rng.standard_normal(20)
    np.testing.assert_allclose(cosine_sums(x, v, 12, start=5), cosine_sums(x, v, 12)[5:], atol=1e-14)


@pytest.mark.parametrize("K", [0, 1, 3, 40, 257])
@pytest.mark.parametrize("tol", [1e-6, 1e-10])
def test_gridded_path_meets_tolerance(K, tol, rng):
    x, v = rng.random(300), rng.standard_normal(300)
    err = np.max(np.abs(cosine_sums(x, v, K, method="fast", tol=tol) - cosine_sums(x, v, K)))
    assert err <= tol * np.abs(v).sum()


@pytest.mark.parametrize("args", [
    dict(x=[0.1, 0.2], v=[1.0], K=3),
    dict(x=[0.1, 0.2], v=[1.0, np.nan], K=3),
    dict(x=[0.1, 0.2], v=[1.0, 2.0], K=-1),
    dict(x=[0.1, 0.2], v=[1.0, 2.0], K=3, method="bogus"),
])
def test_cosine_sums_rejects(args):
    with pytest.raises(ValueError):
        cosine_sums(**args)


def test_2d_single_origin_point():
    np.testing.assert_allclose(cosine_sums_2d([0.0], [0.0], [1.0], 1, 1), np.ones((2, 2)))


def test_2d_zero_values(rng):
    assert not np.any(cosine_sums_2d(rng.random(9), rng.random(9), np.zeros(9), 3, 4))


def test_2d_random_against_compensated_sum(rng):
    x, y, v = rng.random(40), rng.random(40), rng.standard_normal(40)
    ref = fsum_moments_2d(x, y, v, 8, 8)
    got = cosine_sums_2d(x, y, v, 8, 8)
    assert got.shape == (9, 9)
    assert np.max(np.abs(got - ref)) <= 1e-13 * np.abs(v).sum()


def test_2d_length_mismatch():
    with pytest.raises(ValueError):
        cosine_sums_2d([0.1, 0.2], [0.1], [1.0, 1.0], 1, 1)


def test_constant_polynomial(rng):
    t = rng.random(11)
    np.testing.assert_allclose(eval_poly([math.sqrt(2), 0, 0, 0], t), np.ones(11), atol=1e-15)


def test_single_cosine_values():
    np.testing.assert_allclose(eval_poly([0.0, 1.0], [0.0, 0.5, 1.0, 0.3]),
                               [1.0, 0.0, -1.0, math.cos(0.3 * math.pi)], atol=1e-15)


coeffs = st.integers(0, 40).flatmap(
    lambda m: arrays(float, m + 1, elements=st.floats(-10, 10, allow_nan=False)))


@given(coeffs, st.integers(1, 60))
def test_grid_evaluation_matches_direct(c, L):
    t = np.arange(L + 1) / L
    k = np.arange(c.size)
    direct = np.cos(np.pi * np.outer(t, k)) @ c - c[0] * (1 - 1 / math.sqrt(2))
    scale = np.abs(c).sum() + 1e-300
    assert np.max(np.abs(eval_poly_grid(c, L) - direct)) <= 1e-12 * scale
    assert np.max(np.abs(eval_poly(c, uniform_grid(L)) - direct)) <= 1e-12 * scale


def test_outside_domain_warns_but_evaluates():
    with pytest.warns(OutsideDomainWarning):
        val = eval_poly([0.0, 1.0], [1.5, 0.2])
    # even/periodic extension: cos(1.5 pi) = 0
    np.testing.assert_allclose(val[0], 0.0, atol=1e-15)


def test_inside_domain_is_silent():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        eval_poly([1.0, 2.0], [0.0, 0.33, 1.0])


def test_non_finite_coefficients_rejected():
    with pytest.raises(ValueError):
        eval_poly([1.0, np.inf], [0.5])


def test_2d_constant_and_single_mode(rng):
    c = np.zeros((3, 4))
    c[0, 0] = math.sqrt(2)
    x, y = rng.random(7), rng.random(7)
    np.testing.assert_allclose(eval_poly_2d(c, x, y), np.ones(7), atol=1e-15)
    c = np.zeros((2, 2))
    c[1, 0] = 1.0
    np.testing.assert_allclose(eval_poly_2d(c, [0.5, 0.5], [0.1, 0.9]), [0.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(eval_poly_2d(c, x, y), np.cos(np.pi * x), atol=1e-14)


@pytest.mark.parametrize("shape,L", [((1, 1), 3), ((4, 6), 5), ((12, 3), 7), ((11, 11), 150)])
def test_2d_grid_matches_scattered(shape, L, rng):
    c = rng.standard_normal(shape)
    G = eval_poly_2d_grid(c, L)
    X, Y = np.meshgrid(np.arange(L + 1) / L, np.arange(L + 1) / L, indexing="ij")
    direct = eval_poly_2d(c, X.ravel(), Y.ravel()).reshape(X.shape)
    assert G.shape == (L + 1, L + 1)
    assert np.max(np.abs(G - direct)) <= 1e-12 * np.abs(c).sum()


def test_2d_grid_rectangular(rng):
    c = rng.standard_normal((3, 5))
    G = eval_poly_2d_grid(c, 4, 9)
    X, Y = np.meshgrid(np.arange(5) / 4, np.arange(10) / 9, indexing="ij")
    np.testing.assert_allclose(G, eval_poly_2d(c, X.ravel(), Y.ravel()).reshape(5, 10), atol=1e-12)
