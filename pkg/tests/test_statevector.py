import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import kron_matrix, sum_matrix
from tvvqe.pauli import PauliSum, PauliTerm
from tvvqe.statevector import (
    SimulationError,
    StateVector,
    apply_pauli,
    apply_pauli_exponential,
    apply_sum,
    basis_state,
    cross_expectation,
    expectation,
    imag_cross_expectation,
    overlap,
    overlap_squared,
)


def random_state(rng, n):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector.from_amplitudes(v, normalize=True)


def random_hermitian(rng, n, k=6):
    terms = []
    for _ in range(k):
        axes = "".join(rng.choice(list("IXYZ"), n))
        terms.append(PauliTerm(rng.normal(), axes))
    return PauliSum.from_terms(terms)


def test_basis_state_convention():
    assert np.flatnonzero(basis_state("1000").amplitudes).tolist() == [8]
    assert np.flatnonzero(basis_state("0000").amplitudes).tolist() == [0]
    assert np.flatnonzero(basis_state("1100").amplitudes).tolist() == [12]
    with pytest.raises(SimulationError):
        basis_state("10a")


def test_amplitudes_are_read_only():
    s = basis_state("01")
    with pytest.raises(ValueError):
        s.amplitudes[0] = 1.0


def test_apply_pauli_examples():
    assert np.allclose(apply_pauli(basis_state("0"), PauliTerm(1, "X")).amplitudes, [0, 1])
    assert np.allclose(apply_pauli(basis_state("1"), PauliTerm(1, "Z")).amplitudes, [0, -1])
    assert np.allclose(apply_pauli(basis_state("0"), PauliTerm(2j, "Y")).amplitudes, [0, -2])


def test_apply_pauli_width_mismatch():
    with pytest.raises(SimulationError):
        apply_pauli(basis_state("00"), PauliTerm(1, "X"))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.text("IXYZ", min_size=n, max_size=n)), st.integers(0, 2**31 - 1))
def test_apply_pauli_matches_dense(axes, seed):
    rng = np.random.default_rng(seed)
    s = random_state(rng, len(axes))
    got = apply_pauli(s, PauliTerm(0.7 - 0.2j, axes)).amplitudes
    want = (0.7 - 0.2j) * kron_matrix(axes) @ s.amplitudes
    assert np.allclose(got, want, atol=1e-13)


def test_exponential_examples():
    out = apply_pauli_exponential(basis_state("0"), PauliTerm(1, "X"), np.pi / 2)
    assert np.allclose(out.amplitudes, [0, -1j], atol=1e-15)
    theta = 0.37
    out = apply_pauli_exponential(basis_state("00"), PauliTerm(1, "ZZ"), theta)
    assert np.allclose(out.amplitudes, [np.exp(-1j * theta), 0, 0, 0])
    s = random_state(np.random.default_rng(1), 3)
    assert np.array_equal(apply_pauli_exponential(s, PauliTerm(1, "XYZ"), 0.0).amplitudes, s.amplitudes)


def test_exponential_rejects_complex_coefficient():
    with pytest.raises(SimulationError):
        apply_pauli_exponential(basis_state("0"), PauliTerm(1j, "X"), 0.1)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.tuples(st.text("IXYZ", min_size=n, max_size=n), st.floats(-4, 4)), min_size=1, max_size=10)), st.integers(0, 2**31 - 1))
def test_exponential_sequence_preserves_norm_and_inverts(ops, seed):
    n = len(ops[0][0])
    s = random_state(np.random.default_rng(seed), n)
    out = s
    for axes, angle in ops:
        out = apply_pauli_exponential(out, PauliTerm(1.0, axes), angle)
    assert abs(out.norm() - 1) < 1e-10
    for axes, angle in reversed(ops):
        out = apply_pauli_exponential(out, PauliTerm(1.0, axes), -angle)
    assert np.allclose(out.amplitudes, s.amplitudes, atol=1e-12)


def test_exponential_matches_matrix_exponential():
    from scipy.linalg import expm

    s = random_state(np.random.default_rng(7), 3)
    term = PauliTerm(-0.8, "XZY")
    got = apply_pauli_exponential(s, term, 0.45).amplitudes
    want = expm(-1j * 0.45 * -0.8 * kron_matrix("XZY")) @ s.amplitudes
    assert np.allclose(got, want, atol=1e-13)


def test_expectation_examples(h2):
    assert expectation(basis_state("0"), PauliSum.from_terms([PauliTerm(1, "Z")])) == pytest.approx(1.0)
    plus = StateVector.from_amplitudes([1, 1], normalize=True)
    assert expectation(plus, PauliSum.from_terms([PauliTerm(1, "X")])) == pytest.approx(1.0)
    dense = sum_matrix(h2.hamiltonian)
    assert expectation(basis_state("1100"), h2.hamiltonian) == pytest.approx(dense[12, 12].real, abs=1e-12)


def test_expectation_rejects_non_hermitian():
    with pytest.raises(SimulationError):
        expectation(basis_state("0"), PauliSum.from_terms([PauliTerm(1j, "Z")]))


@pytest.mark.parametrize("seed", range(5))
def test_apply_sum_and_expectation_match_dense(seed):
    rng = np.random.default_rng(seed)
    n = 4
    h = random_hermitian(rng, n)
    s = random_state(rng, n)
    m = sum_matrix(h)
    assert np.allclose(apply_sum(s, h).amplitudes, m @ s.amplitudes, atol=1e-12)
    assert expectation(s, h) == pytest.approx(np.vdot(s.amplitudes, m @ s.amplitudes).real, abs=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_expectation_within_spectrum(seed):
    rng = np.random.default_rng(100 + seed)
    n = int(rng.integers(1, 7))
    h = random_hermitian(rng, n, 8)
    w = np.linalg.eigvalsh(sum_matrix(h))
    for _ in range(5):
        e = expectation(random_state(rng, n), h)
        assert w[0] - 1e-10 <= e <= w[-1] + 1e-10


def test_imag_cross_expectation_examples():
    z = PauliSum.from_terms([PauliTerm(1, "Z")])
    zero, one = basis_state("0"), basis_state("1")
    assert imag_cross_expectation(zero, z, zero) == 0.0
    assert imag_cross_expectation(zero, z, one) == 0.0
    for theta in np.linspace(-3, 3, 13):
        bra = apply_pauli_exponential(zero, PauliTerm(1, "X"), theta)
        ket = apply_pauli(bra, PauliTerm(1, "X"))
        assert imag_cross_expectation(bra, z, ket) == pytest.approx(-np.sin(2 * theta), abs=1e-14)


@pytest.mark.parametrize("seed", range(5))
def test_imag_cross_expectation_vanishes_on_diagonal(seed):
    rng = np.random.default_rng(seed)
    s = random_state(rng, 4)
    h = random_hermitian(rng, 4)
    assert abs(imag_cross_expectation(s, h, s)) < 1e-10
    a, b = random_state(rng, 4), random_state(rng, 4)
    want = np.vdot(a.amplitudes, sum_matrix(h) @ b.amplitudes)
    assert cross_expectation(a, h, b) == pytest.approx(want, abs=1e-12)


def test_overlap_examples():
    zero, one = basis_state("0"), basis_state("1")
    plus = StateVector.from_amplitudes([1, 1], normalize=True)
    assert overlap_squared(zero, zero) == pytest.approx(1.0)
    assert overlap_squared(zero, one) == 0.0
    assert overlap_squared(zero, plus) == pytest.approx(0.5)


@pytest.mark.parametrize("seed", range(10))
def test_overlap_symmetry(seed):
    rng = np.random.default_rng(seed)
    a, b = random_state(rng, 3), random_state(rng, 3)
    assert overlap_squared(a, b) == overlap_squared(b, a)
    assert overlap(a, b) == pytest.approx(np.conj(overlap(b, a)))
