import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tvvqe.bfgs import (
    GRADIENT_TOL,
    LINE_SEARCH_FAILURE,
    MAX_ITER,
    OBJECTIVE_TOL,
    OptimizerConfig,
    minimize,
)


def quadratic():
    return (lambda x: float((x[0] - 3.0) ** 2)), (lambda x: np.array([2.0 * (x[0] - 3.0)]))


def rosenbrock(x):
    return float((1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2)


def rosenbrock_grad(x):
    return np.array([-2 * (1 - x[0]) - 400 * x[0] * (x[1] - x[0] ** 2), 200 * (x[1] - x[0] ** 2)])


def test_one_dimensional_quadratic():
    f, g = quadratic()
    res = minimize(f, g, [0.0])
    assert abs(res.theta_final[0] - 3.0) < 1e-8
    assert res.iterations_used <= 5
    assert res.termination_reason == GRADIENT_TOL


def test_rosenbrock():
    res = minimize(rosenbrock, rosenbrock_grad, [-1.2, 1.0], OptimizerConfig(max_iterations=500, gradient_tolerance=1e-9))
    assert np.allclose(res.theta_final, [1.0, 1.0], atol=1e-6)


def test_zero_budget_returns_initial_point():
    f, g = quadratic()
    res = minimize(f, g, [0.5], OptimizerConfig(max_iterations=0))
    assert res.iterations_used == 0
    assert res.theta_final[0] == 0.5
    assert len(res.trace) == 1
    assert res.termination_reason == MAX_ITER


def test_already_stationary():
    f, g = quadratic()
    res = minimize(f, g, [3.0])
    assert res.termination_reason == GRADIENT_TOL and res.iterations_used == 0


def test_budget_exhaustion_reports_max_iter():
    res = minimize(rosenbrock, rosenbrock_grad, [-1.2, 1.0], OptimizerConfig(max_iterations=3))
    assert res.iterations_used == 3
    assert res.termination_reason == MAX_ITER
    assert len(res.trace) == 4


def test_evaluation_budget():
    res = minimize(rosenbrock, rosenbrock_grad, [-1.2, 1.0], OptimizerConfig(max_evaluations=5))
    assert res.evaluations <= 5
    assert res.termination_reason == MAX_ITER


def test_objective_tolerance_stops_early():
    res = minimize(rosenbrock, rosenbrock_grad, [-1.2, 1.0], OptimizerConfig(objective_tolerance=1.0))
    assert res.termination_reason == OBJECTIVE_TOL
    assert res.objective_final <= 1.0
    assert rosenbrock(res.theta_final) > 1e-3
    f, g = quadratic()
    res0 = minimize(f, g, [2.5], OptimizerConfig(objective_tolerance=1.0))
    assert res0.termination_reason == OBJECTIVE_TOL and res0.iterations_used == 0


def test_line_search_failure_is_reported():
    # gradient points the wrong way, so no backtracked step satisfies Armijo
    res = minimize(lambda x: float(x[0] ** 2), lambda x: np.array([-2.0 * x[0]]), [1.0], OptimizerConfig(max_backtracks=5))
    assert res.termination_reason == LINE_SEARCH_FAILURE


def test_config_validation():
    for kw in ({"max_iterations": -1}, {"armijo_c1": 0.0}, {"backtrack_factor": 1.0}, {"gradient_tolerance": 0.0}, {"max_evaluations": 0}):
        with pytest.raises(ValueError):
            OptimizerConfig(**kw)
    with pytest.raises(ValueError):
        minimize(*quadratic(), [np.nan])


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_monotone_trace_and_spd_inverse_hessian(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n))
    q = a @ a.T + n * np.eye(n)
    b = rng.normal(size=n)
    f = lambda x: float(0.5 * x @ q @ x - b @ x + 0.1 * np.sum(x**4))
    g = lambda x: q @ x - b + 0.4 * x**3
    res = minimize(f, g, rng.normal(size=n) * 2, OptimizerConfig(max_iterations=50))
    values = [e.objective for e in res.trace]
    assert all(b2 <= a2 for a2, b2 in zip(values, values[1:]))
    np.linalg.cholesky(res.inverse_hessian)


def test_deterministic():
    a = minimize(rosenbrock, rosenbrock_grad, [-1.2, 1.0], OptimizerConfig(max_iterations=40))
    b = minimize(rosenbrock, rosenbrock_grad, [-1.2, 1.0], OptimizerConfig(max_iterations=40))
    assert np.array_equal(a.theta_final, b.theta_final)
    assert [e.objective for e in a.trace] == [e.objective for e in b.trace]
