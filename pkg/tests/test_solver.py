import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cosapprox.solver import (AdjointMismatchError, IndefiniteOperatorError,
                              SolverConfig, cg_error_predictor, cg_solve,
                              check_adjoint, condition_bound, lsqr_solve,
                              max_gap, predicted_iterations)
from cosapprox.th_operator import assemble_1d


def random_spd(rng, n, kappa=50.0):
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return Q @ np.diag(np.geomspace(1.0, kappa, n)) @ Q.T


def test_identity_one_step(rng):
    b = rng.standard_normal(7)
    x, rep = cg_solve(lambda v: v, b)
    np.testing.assert_allclose(x, b)
    assert rep.iterations == 1 and rep.converged and rep.status == "converged"


def test_equispaced_half_identity(rng):
    r = 33
    x = np.arange(r) / (r - 1)
    w = np.full(r, 1 / (r - 1))
    w[[0, -1]] /= 2
    op, _ = assemble_1d(x, w, np.zeros(r), 12)
    b = rng.standard_normal(13)
    sol, rep = cg_solve(op.matvec, b)
    np.testing.assert_allclose(sol, 2 * b, rtol=1e-12)
    assert rep.iterations == 1


def test_random_spd_matches_dense_solve(rng):
    G = rng.standard_normal((20, 20))
    A = G @ G.T / 20 + np.eye(20)
    b = rng.standard_normal(20)
    x, rep = cg_solve(lambda v: A @ v, b, SolverConfig(tol=1e-12, max_iter=20))
    assert np.linalg.norm(x - np.linalg.solve(A, b)) <= 1e-8 * np.linalg.norm(x)
    assert rep.iterations <= 20


@given(st.integers(1, 25), st.integers(0, 2**31 - 1))
def test_residual_tolerance_is_met(n, seed):
    rng = np.random.default_rng(seed)
    A = random_spd(rng, n, kappa=10.0)
    b = rng.standard_normal(n)
    x, rep = cg_solve(lambda v: A @ v, b, SolverConfig(tol=1e-9))
    assert rep.converged
    assert np.linalg.norm(b - A @ x) <= 1e-9 * np.linalg.norm(b) * (1 + 1e-6)
    assert rep.residual_history[-1] <= 1e-9


def test_zero_rhs():
    x, rep = cg_solve(lambda v: v, np.zeros(4))
    assert not np.any(x) and rep.status == "zero_rhs" and rep.iterations == 0


def test_iteration_budget_is_not_an_error(rng):
    A = random_spd(rng, 30, kappa=1e4)
    x, rep = cg_solve(lambda v: A @ v, rng.standard_normal(30), SolverConfig(tol=1e-14, max_iter=3))
    assert rep.iterations == 3 and not rep.converged and rep.status == "max_iter"


def test_default_budget_is_four_n():
    assert SolverConfig().iteration_limit(7) == 28
    assert SolverConfig(max_iter=5).iteration_limit(7) == 5


def test_warm_start_from_solution(rng):
    A = random_spd(rng, 10)
    b = rng.standard_normal(10)
    x, rep = cg_solve(lambda v: A @ v, b, SolverConfig(x0=np.linalg.solve(A, b)))
    assert rep.iterations == 0 and rep.converged


def test_indefinite_operator_aborts():
    A = np.diag([1.0, -1.0, 2.0])
    with pytest.raises(IndefiniteOperatorError) as info:
        cg_solve(lambda v: A @ v, np.array([0.0, 1.0, 0.0]))
    assert info.value.report.status == "indefinite"


def test_bad_config():
    with pytest.raises(ValueError):
        SolverConfig(tol=0)
    with pytest.raises(ValueError):
        SolverConfig(max_iter=0)


def test_report_serializes(rng):
    A = random_spd(rng, 5)
    _, rep = cg_solve(lambda v: A @ v, rng.standard_normal(5))
    d = json.loads(json.dumps(rep.to_dict()))
    assert d["converged"] is True and d["iterations"] == rep.iterations


@pytest.mark.parametrize("pts,delta", [([0, 0.5, 1], 0.5), ([0.25, 0.75], 0.5), ([0.5], 1.0),
                                       ([0.1, 0.2, 0.9], 0.7)])
def test_max_gap(pts, delta):
    assert max_gap(pts) == pytest.approx(delta, abs=1e-15)


def test_max_gap_empty():
    with pytest.raises(ValueError):
        max_gap([])


def test_condition_bound():
    assert condition_bound(0.01, 50) == pytest.approx(9.0)
    assert condition_bound(0.02, 50) is None
    assert condition_bound(0.5, 3) is None
    assert condition_bound(1e-12, 3) == pytest.approx(1.0, abs=1e-10)


def test_error_predictor_values():
    assert cg_error_predictor(9.0, 1.0, 2) == pytest.approx(4.5)
    assert cg_error_predictor(1.0, 3.0, 5) == 0.0
    assert cg_error_predictor(7.0, 2.0, 0) == pytest.approx(28.0)
    np.testing.assert_allclose(cg_error_predictor(9.0, 1.0, np.arange(3)), [18, 9, 4.5])


@given(st.floats(1.0, 1e6), st.floats(1e-14, 0.5))
def test_predicted_iterations_inverts_bound(kappa, tol):
    n = predicted_iterations(kappa, tol)
    assert cg_error_predictor(kappa, 1.0, n) <= tol * (1 + 1e-9)
    if n > 1:
        assert cg_error_predictor(kappa, 1.0, n - 1) > tol


def test_cg_residual_within_prediction(rng):
    # relative residual after n steps from zero is bounded by 2 kappa q^n
    A = random_spd(rng, 40, kappa=100.0)
    b = rng.standard_normal(40)
    _, rep = cg_solve(lambda v: A @ v, b, SolverConfig(tol=1e-10))
    bound = cg_error_predictor(100.0, 1.0, np.arange(rep.iterations + 1))
    assert np.all(np.array(rep.residual_history) <= bound * (1 + 1e-9))


def test_adjoint_check(rng):
    V = rng.standard_normal((6, 4))
    check_adjoint(lambda c: V @ c, lambda s: V.T @ s, 6, 4)
    with pytest.raises(AdjointMismatchError):
        check_adjoint(lambda c: V @ c, lambda s: 2 * V.T @ s, 6, 4)


def test_lsqr_interpolation(rng):
    V = rng.standard_normal((11, 11))
    s = rng.standard_normal(11)
    x, rep = lsqr_solve(lambda c: V @ c, lambda v: V.T @ v, s, 11, SolverConfig(tol=1e-10))
    assert np.linalg.norm(V @ x - s) <= 1e-8 * np.linalg.norm(s)


def test_lsqr_zero_rhs(rng):
    V = rng.standard_normal((8, 3))
    x, rep = lsqr_solve(lambda c: V @ c, lambda v: V.T @ v, np.zeros(8), 3)
    assert not np.any(x) and rep.status == "zero_rhs"


def test_lsqr_overdetermined(rng):
    V = rng.standard_normal((60, 11))
    s = rng.standard_normal(60)
    x, rep = lsqr_solve(lambda c: V @ c, lambda v: V.T @ v, s, 11)
    ref = np.linalg.solve(V.T @ V, V.T @ s)
    assert np.max(np.abs(x - ref)) <= 1e-7
    assert rep.converged and rep.residual_history[0] <= 1e-8


def test_lsqr_rejects_inconsistent_adjoint(rng):
    V = rng.standard_normal((8, 3))
    with pytest.raises(AdjointMismatchError):
        lsqr_solve(lambda c: V @ c, lambda v: V[:3].T @ v[:3], rng.standard_normal(8), 3)
