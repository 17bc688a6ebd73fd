"""BFGS with an inverse-Hessian update and Armijo backtracking."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

GRADIENT_TOL = "gradient_tol"
STEP_TOL = "step_tol"
MAX_ITER = "max_iter"
LINE_SEARCH_FAILURE = "line_search_failure"
OBJECTIVE_TOL = "objective_tol"


@dataclass(frozen=True)
class OptimizerConfig:
    max_iterations: int = 100
    gradient_tolerance: float = 1e-5
    step_tolerance: float = 1e-14
    armijo_c1: float = 1e-4
    backtrack_factor: float = 0.5
    max_backtracks: int = 40
    curvature_guard: float = 1e-10
    # stop once the objective itself is at or below this value (for non-negative objectives)
    objective_tolerance: float | None = None
    # optional cap on objective evaluations, for budgets counted in evaluations rather than steps
    max_evaluations: int | None = None

    def __post_init__(self):
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if not 0 < self.armijo_c1 < 1:
            raise ValueError("armijo_c1 must lie in (0, 1)")
        if not 0 < self.backtrack_factor < 1:
            raise ValueError("backtrack_factor must lie in (0, 1)")
        if self.gradient_tolerance <= 0 or self.step_tolerance <= 0 or self.max_backtracks < 1:
            raise ValueError("tolerances and max_backtracks must be positive")
        if self.max_evaluations is not None and self.max_evaluations < 1:
            raise ValueError("max_evaluations must be >= 1 when given")


@dataclass
class TraceEntry:
    theta: np.ndarray
    objective: float
    gradient_norm: float


@dataclass
class OptimizerResult:
    theta_final: np.ndarray
    objective_final: float
    iterations_used: int
    trace: list[TraceEntry] = field(default_factory=list)
    termination_reason: str = MAX_ITER
    inverse_hessian: np.ndarray | None = None
    updates_skipped: int = 0
    evaluations: int = 1


def _initial_inverse_hessian(g: np.ndarray) -> np.ndarray:
    gnorm = float(np.linalg.norm(g))
    scale = 1.0 if gnorm == 0.0 else float(np.clip(1.0 / gnorm, 1e-3, 1e3))
    return scale * np.eye(g.size)


def minimize(
    objective: Callable[[np.ndarray], float],
    gradient: Callable[[np.ndarray], np.ndarray],
    theta0,
    config: OptimizerConfig = OptimizerConfig(),
) -> OptimizerResult:
    x = np.array(theta0, dtype=float).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise ValueError("theta0 must be finite")
    f = float(objective(x))
    g = np.asarray(gradient(x), dtype=float)
    gnorm = float(np.max(np.abs(g))) if g.size else 0.0
    trace = [TraceEntry(x.copy(), f, gnorm)]
    hinv = _initial_inverse_hessian(g)
    result = OptimizerResult(x, f, 0, trace, MAX_ITER, hinv)

    if config.max_iterations == 0:
        return result
    if x.size == 0 or gnorm <= config.gradient_tolerance:
        result.termination_reason = GRADIENT_TOL
        return result
    if config.objective_tolerance is not None and f <= config.objective_tolerance:
        result.termination_reason = OBJECTIVE_TOL
        return result

    budget = config.max_evaluations
    evaluations = 1
    for it in range(1, config.max_iterations + 1):
        p = -hinv @ g
        slope = float(g @ p)
        if slope >= 0:
            # lost descent direction (numerical noise); restart from steepest descent
            hinv = _initial_inverse_hessian(g)
            p = -hinv @ g
            slope = float(g @ p)
        alpha = 1.0
        accepted = exhausted = False
        for _ in range(config.max_backtracks):
            if budget is not None and evaluations >= budget:
                exhausted = True
                break
            x_new = x + alpha * p
            f_new = float(objective(x_new))
            evaluations += 1
            if np.isfinite(f_new) and f_new <= f + config.armijo_c1 * alpha * slope:
                accepted = True
                break
            alpha *= config.backtrack_factor
        if exhausted:
            result.termination_reason = MAX_ITER
            break
        if not accepted:
            result.termination_reason = LINE_SEARCH_FAILURE
            break
        s = x_new - x
        g_new = np.asarray(gradient(x_new), dtype=float)
        y = g_new - g
        ys = float(y @ s)
        if ys > config.curvature_guard:
            rho = 1.0 / ys
            eye = np.eye(x.size)
            a = eye - rho * np.outer(s, y)
            hinv = a @ hinv @ a.T + rho * np.outer(s, s)
            hinv = 0.5 * (hinv + hinv.T)
        else:
            result.updates_skipped += 1
        x, f, g = x_new, f_new, g_new
        gnorm = float(np.max(np.abs(g)))
        trace.append(TraceEntry(x.copy(), f, gnorm))
        result.iterations_used = it
        if gnorm <= config.gradient_tolerance:
            result.termination_reason = GRADIENT_TOL
            break
        if config.objective_tolerance is not None and f <= config.objective_tolerance:
            result.termination_reason = OBJECTIVE_TOL
            break
        if float(np.linalg.norm(s)) <= config.step_tolerance:
            result.termination_reason = STEP_TOL
            break
    else:
        result.termination_reason = MAX_ITER

    result.theta_final = x
    result.objective_final = f
    result.evaluations = evaluations
    result.inverse_hessian = hinv
    return result
