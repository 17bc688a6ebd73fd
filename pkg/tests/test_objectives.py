import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tvvqe.ansatz import UccAnsatz, VariableBlock, build_uccsd
from tvvqe.exact import sector_spectrum
from tvvqe.hamiltonians import HubbardSpec, build_hubbard
from tvvqe.objectives import (
    ConfigurationError,
    ConstraintParams,
    DeflationParams,
    StateProblem,
    analytic_gradient,
    analytic_gradient_by_slots,
    constraint_term,
    deflation_term,
    fdm_gradient,
    objective_f,
    objective_f_gradient,
    objective_ftv,
    objective_parts,
    tangent_norm,
    trial_energy,
)
from tvvqe.pauli import PauliSum, PauliTerm
from tvvqe.statevector import StateVector, basis_state


def toy_problem(**kw):
    # E(theta) = <0| e^{i theta X} Z e^{-i theta X} |0> = cos(2 theta)
    ans = UccAnsatz((VariableBlock(0, (PauliTerm(1.0, "X"),)),), 1, 1)
    return StateProblem(PauliSum.from_terms([PauliTerm(1, "Z")]), ans, basis_state("0"), **kw)


def h2_problem(h2, ref="1100", **kw):
    return StateProblem(h2.hamiltonian, build_uccsd(h2, ref), basis_state(ref), **kw)


def test_toy_energy_and_gradient():
    p = toy_problem()
    for theta in np.linspace(-2, 2, 9):
        assert trial_energy(p, [theta]) == pytest.approx(math.cos(2 * theta), abs=1e-14)
        assert analytic_gradient(p, [theta])[0] == pytest.approx(-2 * math.sin(2 * theta), abs=1e-13)


def test_toy_tangent_objective():
    p = toy_problem()
    assert objective_ftv(p, [math.pi / 4]) == pytest.approx(2.0, abs=1e-14)
    assert objective_ftv(p, [0.0]) == pytest.approx(0.0, abs=1e-14)


def test_constraint_examples():
    n = 4
    ans = UccAnsatz((VariableBlock(0, (PauliTerm(1.0, "XYII"),)),), n, 1)
    h = PauliSum.from_terms([PauliTerm(1, "ZIII")])
    one = StateProblem(h, ans, basis_state("1000"), constraint=ConstraintParams(electron_target=2, sz_target=None))
    assert constraint_term(one, [0.0]) == pytest.approx(1.0)
    both = StateProblem(h, ans, basis_state("1000"), constraint=ConstraintParams(electron_target=2, sz_target=0.0))
    assert constraint_term(both, [0.0]) == pytest.approx(1.25)
    ok = StateProblem(h, ans, basis_state("1100"), constraint=ConstraintParams(electron_target=2, sz_target=0.0))
    assert constraint_term(ok, [0.0]) == pytest.approx(0.0, abs=1e-15)
    weighted = StateProblem(h, ans, basis_state("1000"), constraint=ConstraintParams(2, None, number_weight=3.0))
    assert constraint_term(weighted, [0.0]) == pytest.approx(3.0)


def test_negative_weights_rejected():
    with pytest.raises(ConfigurationError):
        ConstraintParams(number_weight=-1)
    with pytest.raises(ConfigurationError):
        DeflationParams(b=-0.1)
    with pytest.raises(ConfigurationError):
        DeflationParams(mode="bogus")


def scalar_deflation(s, e, a, b, alpha, r, r_d):
    # independent evaluation of the bond-dependent penalty for one lower state
    f = 1 / (math.exp(alpha * (r - r_d)) + 1)
    g = 1 / (math.exp(r - r_d / 4) + 1)
    q = (r / r_d) ** 4 * abs(e) / 4
    q2 = (1 + 2 * (math.sqrt(5) + 1)) * q
    q1 = 2 * (math.sqrt(5) + 1) * q
    return (a * f + b * (1 - f)) * (g * s + (1 - g) * (q2 * s * s + q1 * s))


def test_deflation_closed_form_at_design_length():
    d = DeflationParams(a=2.0, b=1.0, alpha=100.0, r=0.74, r_d=0.74, lower_energies=(-1.1,))
    assert d.fermi_factor == pytest.approx(0.5)
    assert d.prefactor == pytest.approx(1.5)
    for s in (0.0, 0.1, 0.5, 1.0):
        value, slopes = d.penalty([s])
        assert value == pytest.approx(scalar_deflation(s, -1.1, 2.0, 1.0, 100.0, 0.74, 0.74), rel=1e-14)
        h = 1e-6
        fd = (scalar_deflation(s + h, -1.1, 2.0, 1.0, 100.0, 0.74, 0.74) - scalar_deflation(s - h, -1.1, 2.0, 1.0, 100.0, 0.74, 0.74)) / (2 * h)
        assert slopes[0] == pytest.approx(fd, rel=1e-7)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 1), st.floats(0.2, 3.0), st.floats(-20, 20))
def test_deflation_matches_scalar_formula(s, r, e):
    d = DeflationParams(r=r, r_d=0.74, lower_energies=(e,))
    assert d.penalty([s])[0] == pytest.approx(scalar_deflation(s, e, 1.0, 1.0, 100.0, r, 0.74), rel=1e-12, abs=1e-300)
    assert d.penalty([s])[0] >= 0


def test_deflation_needs_energies_per_lower_state():
    d = DeflationParams(lower_energies=(-1.0,))
    with pytest.raises(ConfigurationError):
        d.penalty([0.1, 0.2])


def test_overlap_mode():
    d = DeflationParams(mode="overlap", beta=3.0)
    assert d.penalty([0.1, 0.2]) == (pytest.approx(0.9), [3.0, 3.0])


def test_objective_is_sum_of_parts(h2):
    levels = sector_spectrum(h2.hamiltonian, 2, 0.0).eigenvalues
    ground = basis_state("1100")
    p = h2_problem(
        h2, "1001",
        lower_states=(ground,),
        deflation=DeflationParams(lower_energies=(levels[0],)),
        constraint=ConstraintParams(electron_target=2),
    )
    theta = np.array([0.3, -0.2, 0.5])
    parts = objective_parts(p, theta)
    assert parts.total == objective_f(p, theta)
    assert parts.energy == trial_energy(p, theta)
    assert parts.constraint == constraint_term(p, theta)
    assert parts.deflation == deflation_term(p, theta)
    assert parts.deflation > 0


def test_ftv_nonnegative_and_small_at_ground_state(h2):
    p = h2_problem(h2)
    rng = np.random.default_rng(4)
    for _ in range(10):
        assert objective_ftv(p, rng.uniform(-np.pi, np.pi, 3)) >= 0
    # the energy minimizer reaches the exact ground state, where the tangent norm vanishes
    from tvvqe.bfgs import OptimizerConfig, minimize

    res = minimize(lambda t: trial_energy(p, t), lambda t: analytic_gradient(p, t), np.zeros(3), OptimizerConfig(gradient_tolerance=1e-10, max_iterations=200))
    assert tangent_norm(p, res.theta_final) < 1e-6
    exact = sector_spectrum(h2.hamiltonian, 2, 0.0).eigenvalues[0]
    assert trial_energy(p, res.theta_final) == pytest.approx(exact, abs=1e-8)


def test_fdm_richardson_order():
    p = toy_problem()
    theta = [0.37]
    exact = -2 * math.sin(0.74)
    e1 = abs(fdm_gradient(p, theta, step=1e-2)[0] - exact)
    e2 = abs(fdm_gradient(p, theta, step=5e-3)[0] - exact)
    # central differences are second order: halving the step quarters the error
    assert e2 / e1 == pytest.approx(0.25, rel=1e-3)
    with pytest.raises(ValueError):
        fdm_gradient(p, theta, step=0)


@pytest.mark.parametrize("seed", range(4))
def test_gradient_routes_agree_h2(seed, h2):
    p = h2_problem(h2)
    theta = np.random.default_rng(seed).uniform(-np.pi, np.pi, 3)
    adj = analytic_gradient(p, theta)
    assert np.allclose(adj, analytic_gradient_by_slots(p, theta), atol=1e-12)
    assert np.allclose(adj, fdm_gradient(p, theta), atol=1e-7)


@pytest.mark.parametrize("depth", [1, 2])
def test_gradient_routes_agree_hubbard(depth):
    spec = HubbardSpec()
    base = build_uccsd(spec, "100110")
    ans = UccAnsatz(base.blocks, base.qubit_count, depth)
    p = StateProblem(build_hubbard(spec), ans, basis_state("100110"))
    theta = np.random.default_rng(depth).uniform(-np.pi, np.pi, ans.parameter_count)
    adj = analytic_gradient(p, theta)
    assert np.allclose(adj, analytic_gradient_by_slots(p, theta), atol=1e-12)
    assert np.allclose(adj, fdm_gradient(p, theta), atol=1e-7)


def test_penalized_gradient_matches_fdm(h2):
    levels = sector_spectrum(h2.hamiltonian, 2, 0.0).eigenvalues
    lower = StateVector.from_amplitudes(np.random.default_rng(0).normal(size=16), normalize=True)
    p = h2_problem(
        h2, "0110",
        lower_states=(lower,),
        deflation=DeflationParams(r=1.2, r_d=0.74, lower_energies=(levels[0],)),
        constraint=ConstraintParams(electron_target=2, sz_target=0.0, number_weight=0.7, sz_weight=1.3),
    )
    theta = np.array([0.4, -1.1, 0.9])
    assert np.allclose(objective_f_gradient(p, theta), fdm_gradient(p, theta, "f"), atol=1e-7)


def test_problem_validation(h2):
    with pytest.raises(ConfigurationError):
        h2_problem(h2, lower_states=(basis_state("1100"),))
    with pytest.raises(ConfigurationError):
        StateProblem(h2.hamiltonian, build_uccsd(h2, "1100"), basis_state("11"))
    bad = StateVector.from_amplitudes(np.ones(16))
    with pytest.raises(ConfigurationError):
        h2_problem(h2, lower_states=(bad,), deflation=DeflationParams(lower_energies=(1.0,)))
