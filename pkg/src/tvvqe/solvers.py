"""The four method drivers: VQE+VQD, TVVQE, SSVQE and MCVQE."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import bfgs
from .ansatz import UccAnsatz, build_shared_uccsd, build_uccsd, prepare_amplitudes
from .exact import jacobi_eigh, log_error
from .hamiltonians import MolecularSystem
from .objectives import (
    ConstraintParams,
    DeflationParams,
    StateProblem,
    _number_and_sz,
    adjoint_gradient,
    analytic_gradient,
    objective_f,
    objective_f_gradient,
    objective_ftv,
    fdm_gradient,
    trial_energy,
)
from .pauli import PauliSum
from .statevector import StateVector, _inner, basis_state, compile_operator, expectation_amplitudes

log = logging.getLogger(__name__)

METHODS = ("vqd", "tvvqe", "ssvqe", "mcvqe")
ITERATION_UNITS = ("step", "evaluation")
ENERGY_PHASE = "energy"
TANGENT_PHASE = "tangent"


class SolverError(ValueError):
    pass


@dataclass(frozen=True)
class TargetState:
    label: str
    occupation: str


@dataclass(frozen=True)
class ProblemSet:
    """A Hamiltonian plus the sector and reference levels the solvers are scored in."""

    hamiltonian: PauliSum
    label: str = ""
    electrons: int | None = None
    sz: float | None = 0.0
    exact_levels: tuple[float, ...] | None = None
    bond_length: float | None = None
    units: str = "hartree"

    @classmethod
    def from_molecular(cls, system: MolecularSystem, exact_levels=None, sz: float = 0.0) -> "ProblemSet":
        return cls(
            system.hamiltonian,
            system.label,
            system.electron_count,
            sz,
            None if exact_levels is None else tuple(float(e) for e in exact_levels),
            system.bond_length,
            system.units,
        )

    @property
    def qubit_count(self) -> int:
        return self.hamiltonian.qubit_count


@dataclass(frozen=True)
class MethodConfig:
    method: str
    states: tuple[TargetState, ...]
    phase1_iterations: int | tuple[int, ...] = 22
    phase2_iterations: int | tuple[int, ...] | None = None
    optimizer: bfgs.OptimizerConfig = bfgs.OptimizerConfig()
    deflation: DeflationParams = DeflationParams()
    number_weight: float = 1.0
    sz_weight: float = 1.0
    trotter_depth: int = 2
    tangent_fd_step: float = 1e-6
    tangent_tolerance: float = 1e-7
    # "step": budgets count BFGS steps; "evaluation": budgets count objective evaluations
    iteration_unit: str = "step"
    # theta starts at zero (the reference determinant) unless a positive scale asks for
    # uniform draws in [-scale, scale] from ``seed``
    initial_theta_scale: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        if self.method not in METHODS:
            raise SolverError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.iteration_unit not in ITERATION_UNITS:
            raise SolverError(f"unknown iteration unit {self.iteration_unit!r}; expected one of {ITERATION_UNITS}")
        if (self.phase2_iterations is not None) != (self.method == "tvvqe"):
            raise SolverError("phase2_iterations is required for tvvqe and only for tvvqe")

    def _budget(self, value, i: int) -> int:
        if isinstance(value, (int, np.integer)):
            return int(value)
        return int(value[min(i, len(value) - 1)])

    def phase1_budget(self, i: int) -> int:
        return self._budget(self.phase1_iterations, i)

    def phase2_budget(self, i: int) -> int:
        return 0 if self.phase2_iterations is None else self._budget(self.phase2_iterations, i)

    def initial_theta(self, size: int, stream: int = 0) -> np.ndarray:
        if self.initial_theta_scale <= 0:
            return np.zeros(size)
        rng = np.random.default_rng([self.seed, stream])
        return rng.uniform(-self.initial_theta_scale, self.initial_theta_scale, size)

    def budgeted(self, budget: int, **overrides) -> bfgs.OptimizerConfig:
        """Optimizer settings for one phase with ``budget`` in this config's iteration unit."""
        if self.iteration_unit == "evaluation" and budget > 0:
            # steps are bounded by evaluations, so the evaluation cap is the binding limit
            return replace(self.optimizer, max_iterations=budget, max_evaluations=budget + 1, **overrides)
        return replace(self.optimizer, max_iterations=budget, **overrides)


@dataclass
class TraceRecord:
    iteration: int
    energy: float
    tangent_norm: float
    log_error: float | None
    phase: str


@dataclass
class StateResult:
    label: str
    occupation: str
    records: list[TraceRecord] = field(default_factory=list)
    theta: np.ndarray | None = None
    state: StateVector | None = None
    energy: float | None = None
    exact: float | None = None
    tangent_start: int | None = None
    termination: tuple[str, ...] = ()
    error: str | None = None

    @property
    def log_error(self) -> float | None:
        if self.energy is None or self.exact is None:
            return None
        return log_error(self.energy, self.exact)


@dataclass
class RunTrace:
    method: str
    system: str
    states: list[StateResult] = field(default_factory=list)
    wall_time: float = 0.0
    subspace_matrix: np.ndarray | None = None

    def final_energies(self) -> list[float | None]:
        return [s.energy for s in self.states]

    def final_states(self) -> list[StateVector | None]:
        return [s.state for s in self.states]


def ssvqe_weights(n: int) -> list[float]:
    """lambda_i = 2 (N - i) / (N^2 - N) for i = 0..N-1; a lone state gets weight 1."""
    if n < 1:
        return []
    if n == 1:
        return [1.0]
    return [2.0 * (n - i) / (n * n - n) for i in range(n)]


def _exact(problems: ProblemSet, i: int) -> float | None:
    if problems.exact_levels is None or i >= len(problems.exact_levels):
        return None
    return problems.exact_levels[i]


def _constraint(problems: ProblemSet, cfg: MethodConfig) -> ConstraintParams:
    return ConstraintParams(problems.electrons, problems.sz, cfg.number_weight, cfg.sz_weight)


def _record(p: StateProblem, theta, iteration: int, exact: float | None, phase: str) -> TraceRecord:
    e = trial_energy(p, theta)
    tn = float(np.sum(np.abs(analytic_gradient(p, theta))))
    return TraceRecord(iteration, e, tn, None if exact is None else log_error(e, exact), phase)


# ---------------------------------------------------------------------------
# sequential: VQD and TVVQE
# ---------------------------------------------------------------------------

def _sequential(problems: ProblemSet, cfg: MethodConfig, tangent: bool) -> RunTrace:
    start = time.perf_counter()
    run = RunTrace(cfg.method, problems.label)
    n = problems.qubit_count
    lower: list[StateVector] = []
    lower_energies: list[float] = []
    for i, target in enumerate(cfg.states):
        res = StateResult(target.label, target.occupation, exact=_exact(problems, i))
        run.states.append(res)
        try:
            ansatz = build_uccsd(n, target.occupation, cfg.trotter_depth)
            p = StateProblem(
                problems.hamiltonian,
                ansatz,
                basis_state(target.occupation),
                tuple(lower),
                cfg.deflation.with_lower_energies(lower_energies),
                _constraint(problems, cfg),
                problems.exact_levels,
            )
            theta0 = cfg.initial_theta(ansatz.parameter_count, i)
            opt1 = cfg.budgeted(cfg.phase1_budget(i))
            r1 = bfgs.minimize(lambda t: objective_f(p, t), lambda t: objective_f_gradient(p, t), theta0, opt1)
            for k, entry in enumerate(r1.trace):
                res.records.append(_record(p, entry.theta, k, res.exact, ENERGY_PHASE))
            theta = r1.theta_final
            res.termination = (r1.termination_reason,)
            budget2 = cfg.phase2_budget(i) if tangent else 0
            if budget2 > 0:
                opt2 = cfg.budgeted(budget2, objective_tolerance=cfg.tangent_tolerance)
                h = cfg.tangent_fd_step
                r2 = bfgs.minimize(
                    lambda t: objective_ftv(p, t),
                    lambda t: fdm_gradient(p, t, "ftv", h),
                    theta,
                    opt2,
                )
                res.tangent_start = len(r1.trace)
                for k, entry in enumerate(r2.trace[1:], start=len(r1.trace)):
                    res.records.append(_record(p, entry.theta, k, res.exact, TANGENT_PHASE))
                theta = r2.theta_final
                res.termination += (r2.termination_reason,)
            res.theta = theta
            res.state = StateVector(prepare_amplitudes(ansatz, theta, p.initial_state.amplitudes), n)
            res.energy = trial_energy(p, theta)
        except Exception as exc:  # recorded per state; later states deflate only against successes
            log.warning("%s state %s failed: %s", cfg.method, target.label, exc)
            res.error = f"{type(exc).__name__}: {exc}"
            continue
        lower.append(res.state)
        lower_energies.append(res.exact if res.exact is not None else res.energy)
        log.info("%s %s %s: E=%.12f log_error=%s", cfg.method, problems.label, target.label, res.energy, res.log_error)
    run.wall_time = time.perf_counter() - start
    return run


def solve_vqd(problems: ProblemSet, cfg: MethodConfig) -> RunTrace:
    """Ground state first, then each excited state against all previously frozen states."""
    return _sequential(problems, cfg, tangent=False)


def solve_tvvqe(problems: ProblemSet, cfg: MethodConfig) -> RunTrace:
    """VQD-style energy phase per state, then minimization of the tangent-vector objective."""
    return _sequential(problems, cfg, tangent=True)


# ---------------------------------------------------------------------------
# shared-parameter: SSVQE and MCVQE
# ---------------------------------------------------------------------------

@dataclass
class _Subspace:
    ansatz: UccAnsatz
    initials: list[np.ndarray]
    weights: list[float]
    hamiltonian: PauliSum
    constraint: ConstraintParams

    def states(self, theta) -> list[np.ndarray]:
        return [prepare_amplitudes(self.ansatz, theta, a) for a in self.initials]

    def value(self, theta) -> float:
        phis = self.states(theta)
        total = 0.0
        for lam, phi in zip(self.weights, phis):
            total += lam * (expectation_amplitudes(phi, self.hamiltonian) + self._constraint(phi))
        for i in range(len(phis)):
            for j in range(i + 1, len(phis)):
                total += (self.weights[i] + self.weights[j]) * abs(_inner(phis[i], phis[j])) ** 2
        return total

    def _constraint(self, phi) -> float:
        c = self.constraint
        n_op, sz_op = _number_and_sz(self.ansatz.qubit_count)
        v = 0.0
        if c.electron_target is not None and c.number_weight:
            v += c.number_weight * (expectation_amplitudes(phi, n_op) - c.electron_target) ** 2
        if c.sz_target is not None and c.sz_weight:
            v += c.sz_weight * (expectation_amplitudes(phi, sz_op) - c.sz_target) ** 2
        return v

    def gradient(self, theta) -> np.ndarray:
        phis = self.states(theta)
        h_op = compile_operator(self.hamiltonian)
        n_op, sz_op = (compile_operator(o) for o in _number_and_sz(self.ansatz.qubit_count))
        c = self.constraint
        grad = np.zeros(self.ansatz.parameter_count)
        for i, (lam, init) in enumerate(zip(self.weights, self.initials)):

            def seed(phi, i=i, lam=lam):
                chi = lam * h_op.apply(phi)
                if c.electron_target is not None and c.number_weight:
                    nv = n_op.apply(phi)
                    chi = chi + lam * 2.0 * c.number_weight * (_inner(phi, nv).real - c.electron_target) * nv
                if c.sz_target is not None and c.sz_weight:
                    sv = sz_op.apply(phi)
                    chi = chi + lam * 2.0 * c.sz_weight * (_inner(phi, sv).real - c.sz_target) * sv
                for j, other in enumerate(phis):
                    if j != i:
                        chi = chi + (lam + self.weights[j]) * _inner(other, phi) * other
                return chi

            grad += adjoint_gradient(self.ansatz, theta, init, seed)
        return grad


def _subspace_setup(problems: ProblemSet, cfg: MethodConfig) -> _Subspace:
    occs = [s.occupation for s in cfg.states]
    initials = [basis_state(o) for o in occs]
    for i in range(len(initials)):
        for j in range(i + 1, len(initials)):
            if abs(_inner(initials[i].amplitudes, initials[j].amplitudes)) > 1e-12:
                raise SolverError(f"initial states {occs[i]} and {occs[j]} are not orthogonal")
    ansatz = build_shared_uccsd(problems.qubit_count, occs, cfg.trotter_depth)
    return _Subspace(
        ansatz, [s.amplitudes for s in initials], ssvqe_weights(len(occs)), problems.hamiltonian, _constraint(problems, cfg)
    )


def _shared_run(problems: ProblemSet, cfg: MethodConfig) -> tuple[RunTrace, _Subspace]:
    start = time.perf_counter()
    run = RunTrace(cfg.method, problems.label)
    if not cfg.states:
        return run, None
    sub = _subspace_setup(problems, cfg)
    opt = cfg.budgeted(cfg.phase1_budget(0))
    result = bfgs.minimize(sub.value, sub.gradient, cfg.initial_theta(sub.ansatz.parameter_count), opt)
    n = problems.qubit_count
    for i, target in enumerate(cfg.states):
        p = StateProblem(problems.hamiltonian, sub.ansatz, StateVector(sub.initials[i], n))
        res = StateResult(target.label, target.occupation, exact=_exact(problems, i))
        for k, entry in enumerate(result.trace):
            res.records.append(_record(p, entry.theta, k, res.exact, ENERGY_PHASE))
        res.theta = result.theta_final
        res.state = StateVector(prepare_amplitudes(sub.ansatz, res.theta, sub.initials[i]), n)
        res.energy = trial_energy(p, res.theta)
        res.termination = (result.termination_reason,)
        run.states.append(res)
    run.wall_time = time.perf_counter() - start
    return run, sub


def solve_ssvqe(problems: ProblemSet, cfg: MethodConfig) -> RunTrace:
    """One shared parameter vector minimizing the weighted energy sum over orthogonal inputs."""
    run, _ = _shared_run(problems, cfg)
    return run


def subspace_matrix(h: PauliSum, states: Sequence[StateVector]) -> np.ndarray:
    op = compile_operator(h)
    hv = [op.apply(s.amplitudes) for s in states]
    k = len(states)
    m = np.empty((k, k), dtype=complex)
    for i in range(k):
        for j in range(k):
            m[i, j] = _inner(states[i].amplitudes, hv[j])
    return m


def solve_mcvqe(problems: ProblemSet, cfg: MethodConfig) -> RunTrace:
    """SSVQE followed by diagonalization of H projected onto the optimized states."""
    start = time.perf_counter()
    run, _ = _shared_run(problems, cfg)
    if not run.states:
        return run
    states = [s.state for s in run.states]
    m = subspace_matrix(problems.hamiltonian, states)
    run.subspace_matrix = m
    herm = 0.5 * (m + m.conj().T)
    w, v = jacobi_eigh(herm)
    n = problems.qubit_count
    for k, res in enumerate(run.states):
        amps = sum(v[i, k] * states[i].amplitudes for i in range(len(states)))
        res.state = StateVector(amps, n)
        res.energy = float(w[k])
    run.wall_time = time.perf_counter() - start
    return run


SOLVERS = {"vqd": solve_vqd, "tvvqe": solve_tvvqe, "ssvqe": solve_ssvqe, "mcvqe": solve_mcvqe}


def solve(problems: ProblemSet, cfg: MethodConfig) -> RunTrace:
    return SOLVERS[cfg.method](problems, cfg)
