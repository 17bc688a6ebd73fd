"""Trial energy, penalized objective, analytic gradient and the tangent-vector objective.

All gradients of functionals of the prepared state are assembled with one
forward pass (storing the intermediate states) and one backward pass that
propagates the seed vector dF/d<phi| through the adjoint factors.  For the
energy the seed is H|phi>, and each slot contributes
``2 c Im <mu|P|psi>``: the same quantity as the per-slot Hadamard-test
formula, just organized so every slot reuses the shared prefixes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import expit

from .ansatz import UccAnsatz, apply_derivative_operator, derivative_slots, prepare_amplitudes
from .hamiltonians import number_operator, sz_operator
from .pauli import PauliSum
from .statevector import (
    StateVector,
    _inner,
    _unit_pauli,
    compile_operator,
    exp_pauli_amplitudes,
    expectation_amplitudes,
    imag_cross_expectation,
)

GOLDEN = math.sqrt(5.0) + 1.0


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class DeflationParams:
    """Overlap penalty against frozen lower states.

    ``mode="fermi_dirac"`` is the bond-length dependent penalty

        (a f + b (1 - f)) * sum_j [ g s_j + (1 - g) (q2_j s_j^2 + q1_j s_j) ]

    with s_j = |<lower_j|phi>|^2, f = 1/(exp(alpha (r - r_d)) + 1),
    g = 1/(exp(r - r_d/4) + 1), and
    q2_j = (1 + 2(sqrt5 + 1)) (r/r_d)^4 |E_j| / 4, q1_j = 2(sqrt5 + 1) (r/r_d)^4 |E_j| / 4,
    where E_j is ``lower_energies[j]``.  ``mode="overlap"`` is the plain
    ``beta * sum_j s_j`` penalty, used where no bond length exists.
    """

    mode: str = "fermi_dirac"
    a: float = 1.0
    b: float = 1.0
    alpha: float = 100.0
    r: float = 0.7414
    r_d: float = 0.7414
    lower_energies: tuple[float, ...] = ()
    beta: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "lower_energies", tuple(float(e) for e in self.lower_energies))
        if self.mode not in ("fermi_dirac", "overlap"):
            raise ConfigurationError(f"unknown deflation mode {self.mode!r}")
        if self.mode == "overlap":
            if self.beta < 0:
                raise ConfigurationError("beta must be >= 0")
            return
        if self.a <= 0 or self.alpha <= 0:
            raise ConfigurationError("a and alpha must be positive")
        if self.b < 0:
            raise ConfigurationError("b must be >= 0 for a non-negative penalty")
        if self.r_d <= 0 or self.r <= 0:
            raise ConfigurationError("bond lengths must be positive")

    def with_lower_energies(self, energies: Sequence[float]) -> "DeflationParams":
        return DeflationParams(self.mode, self.a, self.b, self.alpha, self.r, self.r_d, tuple(energies), self.beta)

    @property
    def fermi_factor(self) -> float:
        return float(expit(-self.alpha * (self.r - self.r_d)))

    @property
    def bond_factor(self) -> float:
        return float(expit(-(self.r - 0.25 * self.r_d)))

    @property
    def prefactor(self) -> float:
        f = self.fermi_factor
        return self.a * f + self.b * (1.0 - f)

    def quartic_coefficients(self, j: int) -> tuple[float, float]:
        """(coefficient of s^2, coefficient of s) for lower state j."""
        k = (self.r / self.r_d) ** 4 * abs(self.lower_energies[j]) / 4.0
        return (1.0 + 2.0 * GOLDEN) * k, 2.0 * GOLDEN * k

    def penalty(self, overlaps_sq: Sequence[float]) -> tuple[float, list[float]]:
        """Penalty value and d(penalty)/d(s_j) for each lower state."""
        if self.mode == "overlap":
            return self.beta * float(sum(overlaps_sq)), [self.beta] * len(overlaps_sq)
        if len(self.lower_energies) != len(overlaps_sq):
            raise ConfigurationError(
                f"{len(overlaps_sq)} lower states but {len(self.lower_energies)} lower energies"
            )
        g = self.bond_factor
        pre = self.prefactor
        total = 0.0
        slopes = []
        for j, s in enumerate(overlaps_sq):
            q2, q1 = self.quartic_coefficients(j)
            total += g * s + (1.0 - g) * (q2 * s * s + q1 * s)
            slopes.append(pre * (g + (1.0 - g) * (2.0 * q2 * s + q1)))
        return pre * total, slopes


@dataclass(frozen=True)
class ConstraintParams:
    """Quadratic penalties (<N> - N0)^2 and (<S_z> - Sz0)^2; ``None`` targets are skipped."""

    electron_target: int | None = None
    sz_target: float | None = 0.0
    number_weight: float = 1.0
    sz_weight: float = 1.0

    def __post_init__(self):
        if self.number_weight < 0 or self.sz_weight < 0:
            raise ConfigurationError("penalty weights must be >= 0")


@dataclass(frozen=True, eq=False)
class StateProblem:
    hamiltonian: PauliSum
    ansatz: UccAnsatz
    initial_state: StateVector
    lower_states: tuple[StateVector, ...] = ()
    deflation: DeflationParams | None = None
    constraint: ConstraintParams | None = None
    exact_levels: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "lower_states", tuple(self.lower_states))
        n = self.ansatz.qubit_count
        if self.hamiltonian.qubit_count != n or self.initial_state.qubit_count != n:
            raise ConfigurationError("hamiltonian, ansatz and initial state disagree on qubit count")
        for s in self.lower_states:
            if s.qubit_count != n:
                raise ConfigurationError("lower state has the wrong qubit count")
            if abs(s.norm() - 1.0) > 1e-8:
                raise ConfigurationError("lower states must be normalized")
        if self.lower_states and self.deflation is None:
            raise ConfigurationError("lower states given without deflation parameters")


@dataclass(frozen=True)
class ObjectiveParts:
    energy: float
    constraint: float
    deflation: float

    @property
    def total(self) -> float:
        return self.energy + self.constraint + self.deflation


@lru_cache(maxsize=32)
def _number_and_sz(qubit_count: int) -> tuple[PauliSum, PauliSum]:
    return number_operator(qubit_count), sz_operator(qubit_count)


# ---------------------------------------------------------------------------
# values
# ---------------------------------------------------------------------------

def prepared(p: StateProblem, theta) -> np.ndarray:
    return prepare_amplitudes(p.ansatz, theta, p.initial_state.amplitudes)


def trial_energy(p: StateProblem, theta) -> float:
    return expectation_amplitudes(prepared(p, theta), p.hamiltonian)


def _constraint_value(p: StateProblem, phi: np.ndarray) -> float:
    c = p.constraint
    if c is None:
        return 0.0
    n_op, sz_op = _number_and_sz(p.ansatz.qubit_count)
    total = 0.0
    if c.electron_target is not None and c.number_weight:
        total += c.number_weight * (expectation_amplitudes(phi, n_op) - c.electron_target) ** 2
    if c.sz_target is not None and c.sz_weight:
        total += c.sz_weight * (expectation_amplitudes(phi, sz_op) - c.sz_target) ** 2
    return total


def _overlaps(p: StateProblem, phi: np.ndarray) -> list[complex]:
    return [_inner(low.amplitudes, phi) for low in p.lower_states]


def _deflation_value(p: StateProblem, phi: np.ndarray) -> float:
    if not p.lower_states:
        return 0.0
    value, _ = p.deflation.penalty([abs(o) ** 2 for o in _overlaps(p, phi)])
    return value


def constraint_term(p: StateProblem, theta) -> float:
    return _constraint_value(p, prepared(p, theta))


def deflation_term(p: StateProblem, theta) -> float:
    return _deflation_value(p, prepared(p, theta))


def objective_parts(p: StateProblem, theta) -> ObjectiveParts:
    phi = prepared(p, theta)
    return ObjectiveParts(
        expectation_amplitudes(phi, p.hamiltonian), _constraint_value(p, phi), _deflation_value(p, phi)
    )


def objective_f(p: StateProblem, theta) -> float:
    """Penalized objective F = E + E_const + E_def."""
    return objective_parts(p, theta).total


# ---------------------------------------------------------------------------
# gradients
# ---------------------------------------------------------------------------

def adjoint_gradient(
    ansatz: UccAnsatz, theta, initial: np.ndarray, seed: Callable[[np.ndarray], np.ndarray]
) -> np.ndarray:
    """d/dtheta of a real functional F(phi) given ``seed(phi) = dF/d<phi|``.

    Returns ``2 * sum_slots c * Im <mu_slot|P|psi_slot>`` per variable, where
    ``psi_slot`` is the state just before the slot's factor and ``mu_slot`` is
    the seed pulled back through every factor from the slot onwards.
    """
    factors = ansatz.factors(theta)
    states = [initial]
    for f in factors:
        states.append(exp_pauli_amplitudes(states[-1], f.axes, f.angle))
    mu = seed(states[-1])
    grad = np.zeros(ansatz.parameter_count)
    for idx in range(len(factors) - 1, -1, -1):
        f = factors[idx]
        mu = exp_pauli_amplitudes(mu, f.axes, -f.angle)
        grad[f.variable] += 2.0 * f.scaled_coefficient * _inner(mu, _unit_pauli(states[idx], f.axes)).imag
    return grad


def analytic_gradient(p: StateProblem, theta) -> np.ndarray:
    """Energy gradient dE/dtheta_m = 2 sum_k c_k Im <Phi|U^dag H V_k|Phi>."""
    op = compile_operator(p.hamiltonian)
    return adjoint_gradient(p.ansatz, theta, p.initial_state.amplitudes, op.apply)


def analytic_gradient_by_slots(p: StateProblem, theta) -> np.ndarray:
    """Same as :func:`analytic_gradient`, evaluated one derivative operator at a time."""
    bra = StateVector(prepared(p, theta), p.ansatz.qubit_count)
    grad = np.zeros(p.ansatz.parameter_count)
    for m in range(p.ansatz.parameter_count):
        for slot in derivative_slots(p.ansatz, m):
            ket = apply_derivative_operator(p.ansatz, theta, slot, p.initial_state)
            grad[m] += 2.0 * imag_cross_expectation(bra, p.hamiltonian, ket)
    return grad


def _objective_seed(p: StateProblem) -> Callable[[np.ndarray], np.ndarray]:
    h_op = compile_operator(p.hamiltonian)
    c = p.constraint
    n_op, sz_op = _number_and_sz(p.ansatz.qubit_count)

    def seed(phi):
        chi = h_op.apply(phi)
        if c is not None:
            if c.electron_target is not None and c.number_weight:
                nv = compile_operator(n_op).apply(phi)
                chi = chi + 2.0 * c.number_weight * (_inner(phi, nv).real - c.electron_target) * nv
            if c.sz_target is not None and c.sz_weight:
                sv = compile_operator(sz_op).apply(phi)
                chi = chi + 2.0 * c.sz_weight * (_inner(phi, sv).real - c.sz_target) * sv
        if p.lower_states:
            ovs = _overlaps(p, phi)
            _, slopes = p.deflation.penalty([abs(o) ** 2 for o in ovs])
            for low, o, dp in zip(p.lower_states, ovs, slopes):
                chi = chi + dp * o * low.amplitudes
        return chi

    return seed


def objective_f_gradient(p: StateProblem, theta) -> np.ndarray:
    return adjoint_gradient(p.ansatz, theta, p.initial_state.amplitudes, _objective_seed(p))


def tangent_norm(p: StateProblem, theta) -> float:
    """L1 norm of the energy gradient."""
    return float(np.sum(np.abs(analytic_gradient(p, theta))))


def objective_ftv(p: StateProblem, theta) -> float:
    """F_tv = sum_m |dE/dtheta_m| + E_const + E_def."""
    phi = prepared(p, theta)
    return tangent_norm(p, theta) + _constraint_value(p, phi) + _deflation_value(p, phi)


OBJECTIVES: dict[str, Callable[[StateProblem, np.ndarray], float]] = {
    "energy": trial_energy,
    "f": objective_f,
    "ftv": objective_ftv,
}


def fdm_gradient(p: StateProblem, theta, objective="energy", step: float = 1e-5) -> np.ndarray:
    """Central finite differences of one of ``OBJECTIVES`` (or any callable ``(p, theta)``)."""
    if step <= 0:
        raise ValueError("step must be positive")
    fn = OBJECTIVES[objective] if isinstance(objective, str) else objective
    theta = np.asarray(theta, dtype=float)
    grad = np.zeros(theta.size)
    for m in range(theta.size):
        e = np.zeros(theta.size)
        e[m] = step
        grad[m] = (fn(p, theta + e) - fn(p, theta - e)) / (2.0 * step)
    return grad
