import hashlib

import numpy as np
import pytest

from tvvqe.bfgs import OptimizerConfig
from tvvqe.harness.config import MOLECULAR_STATES
from tvvqe.objectives import DeflationParams
from tvvqe.solvers import (
    ENERGY_PHASE,
    TANGENT_PHASE,
    MethodConfig,
    ProblemSet,
    SolverError,
    TargetState,
    solve,
    ssvqe_weights,
    subspace_matrix,
)
from tvvqe.statevector import overlap_squared


@pytest.fixture(scope="module")
def h2_problems(h2, h2_levels):
    return ProblemSet.from_molecular(h2, h2_levels)


def config(method, states=MOLECULAR_STATES, phase1=10, phase2=None, **kw):
    if method == "tvvqe" and phase2 is None:
        phase2 = 5
    return MethodConfig(method, states, phase1, phase2, deflation=DeflationParams(r=0.74, r_d=0.7414), **kw)


def checksum(state):
    return hashlib.sha256(np.ascontiguousarray(state.amplitudes).tobytes()).hexdigest()


def test_ssvqe_weights():
    assert ssvqe_weights(0) == []
    assert ssvqe_weights(1) == [1.0]
    assert ssvqe_weights(2) == [2.0, 1.0]
    w = ssvqe_weights(4)
    assert sum(w) == pytest.approx(20 / 12)
    assert all(a > b for a, b in zip(w, w[1:]))


def test_config_validation():
    with pytest.raises(SolverError):
        MethodConfig("nope", MOLECULAR_STATES)
    with pytest.raises(SolverError):
        MethodConfig("tvvqe", MOLECULAR_STATES, 10)
    with pytest.raises(SolverError):
        MethodConfig("vqd", MOLECULAR_STATES, 10, 5)
    with pytest.raises(SolverError):
        MethodConfig("vqd", MOLECULAR_STATES, iteration_unit="hour")


def test_per_state_budgets():
    cfg = MethodConfig("tvvqe", MOLECULAR_STATES, (2, 2, 10, 3), 10)
    assert [cfg.phase1_budget(i) for i in range(5)] == [2, 2, 10, 3, 3]
    assert cfg.phase2_budget(2) == 10


@pytest.mark.parametrize("method", ["vqd", "tvvqe", "ssvqe", "mcvqe"])
def test_empty_state_list(method, h2_problems):
    run = solve(h2_problems, config(method, states=()))
    assert run.states == []


def test_tvvqe_without_tangent_phase_equals_vqd(h2_problems):
    a = solve(h2_problems, config("vqd"))
    b = solve(h2_problems, config("tvvqe", phase2=0))
    assert a.final_energies() == b.final_energies()
    assert all(s.tangent_start is None for s in b.states)


def test_vqd_states_are_nearly_orthogonal(h2_problems):
    run = solve(h2_problems, config("vqd", phase1=22))
    states = run.final_states()
    for i in range(len(states)):
        for j in range(i):
            assert overlap_squared(states[i], states[j]) < 0.1


def test_deflation_pushes_identical_initial_state_away(h2_problems):
    twin = (TargetState("ground", "1100"), TargetState("again", "1100"))
    run = solve(h2_problems, config("vqd", states=twin, phase1=22))
    a, b = run.final_states()
    assert overlap_squared(a, b) < 0.5
    assert run.states[1].energy > run.states[0].energy + 1e-3


def test_lower_states_are_frozen(h2_problems):
    one = solve(h2_problems, config("tvvqe", states=MOLECULAR_STATES[:1]))
    all4 = solve(h2_problems, config("tvvqe"))
    assert checksum(one.states[0].state) == checksum(all4.states[0].state)
    two = solve(h2_problems, config("tvvqe", states=MOLECULAR_STATES[:2]))
    assert checksum(two.states[1].state) == checksum(all4.states[1].state)


def test_trace_phases_and_tangent_start(h2_problems):
    run = solve(h2_problems, config("tvvqe"))
    for s in run.states:
        phases = [r.phase for r in s.records]
        k = s.tangent_start
        assert set(phases[:k]) == {ENERGY_PHASE}
        assert set(phases[k:]) <= {TANGENT_PHASE}
        assert [r.iteration for r in s.records] == list(range(len(s.records)))
        assert len(s.termination) == 2


def test_final_energy_replays_from_theta(h2_problems):
    from tvvqe.ansatz import build_uccsd, prepare_amplitudes
    from tvvqe.statevector import StateVector, basis_state, expectation

    run = solve(h2_problems, config("tvvqe"))
    for s in run.states:
        ans = build_uccsd(4, s.occupation, 2)
        amps = prepare_amplitudes(ans, s.theta, basis_state(s.occupation).amplitudes)
        assert expectation(StateVector(amps, 4), h2_problems.hamiltonian) == s.energy
        assert s.records[-1].energy == s.energy


def test_failed_state_is_recorded_and_others_continue(h2_problems):
    states = (TargetState("ground", "1100"), TargetState("bad", "1111"), TargetState("triplet", "1001"))
    run = solve(h2_problems, config("vqd", states=states))
    assert run.states[1].error is not None and "1111" in run.states[1].error
    assert run.states[1].energy is None
    assert run.states[0].energy is not None and run.states[2].energy is not None


def test_mcvqe_subspace_is_hermitian(h2_problems):
    run = solve(h2_problems, config("mcvqe", states=MOLECULAR_STATES[:3], phase1=15))
    m = run.subspace_matrix
    assert m.shape == (3, 3)
    assert np.allclose(m, m.conj().T, atol=1e-10)
    energies = run.final_energies()
    assert energies == sorted(energies)
    assert energies[0] >= h2_problems.exact_levels[0] - 1e-10
    for s in run.states:
        assert abs(s.state.norm() - 1) < 1e-8


def test_mcvqe_single_state_equals_ssvqe(h2_problems):
    a = solve(h2_problems, config("ssvqe", states=MOLECULAR_STATES[:1]))
    b = solve(h2_problems, config("mcvqe", states=MOLECULAR_STATES[:1]))
    assert b.states[0].energy == pytest.approx(a.states[0].energy, abs=1e-12)


def test_subspace_matrix_of_eigenbasis_is_diagonal(h2, h2_levels):
    from tvvqe.exact import sector_spectrum
    from tvvqe.statevector import StateVector

    spec = sector_spectrum(h2.hamiltonian, 2, 0.0)
    vecs = [StateVector(spec.eigenvectors[:, k], 4) for k in range(2)]
    m = subspace_matrix(h2.hamiltonian, vecs)
    assert np.allclose(m, np.diag(h2_levels[:2]), atol=1e-10)


def test_shared_methods_reject_non_orthogonal_inputs(h2_problems):
    twin = (TargetState("a", "1100"), TargetState("b", "1100"))
    with pytest.raises(SolverError):
        solve(h2_problems, config("ssvqe", states=twin))


@pytest.mark.parametrize("method", ["vqd", "tvvqe", "ssvqe", "mcvqe"])
def test_deterministic(method, h2_problems):
    a = solve(h2_problems, config(method, initial_theta_scale=0.3, seed=5))
    b = solve(h2_problems, config(method, initial_theta_scale=0.3, seed=5))
    assert a.final_energies() == b.final_energies()
    assert [checksum(s) for s in a.final_states()] == [checksum(s) for s in b.final_states()]


def test_seed_changes_random_start(h2_problems):
    a = config("vqd", initial_theta_scale=0.3, seed=1).initial_theta(3)
    b = config("vqd", initial_theta_scale=0.3, seed=2).initial_theta(3)
    assert not np.array_equal(a, b)
    assert np.all(np.abs(a) <= 0.3)
    assert np.array_equal(config("vqd").initial_theta(3), np.zeros(3))


def test_evaluation_unit_caps_objective_calls(h2_problems):
    cfg = config("vqd", states=MOLECULAR_STATES[:1], phase1=4, iteration_unit="evaluation")
    opt = cfg.budgeted(4)
    assert opt.max_evaluations == 5
    run = solve(h2_problems, cfg)
    assert len(run.states[0].records) <= 5


def test_zero_budget_records_only_initial_point(h2_problems):
    run = solve(h2_problems, config("vqd", phase1=0))
    for s in run.states:
        assert len(s.records) == 1
        assert np.array_equal(s.theta, np.zeros(3))


def test_optimizer_settings_are_passed_through(h2_problems):
    cfg = MethodConfig("vqd", MOLECULAR_STATES[:1], 50, optimizer=OptimizerConfig(gradient_tolerance=1e-2))
    loose = solve(h2_problems, cfg)
    tight = solve(h2_problems, MethodConfig("vqd", MOLECULAR_STATES[:1], 50))
    assert len(loose.states[0].records) < len(tight.states[0].records)
