"""Exact dense statevector simulation.

Amplitude index ``b`` encodes qubit 0 in its most significant bit, so the ket
string ``"1000"`` is basis index 8.  Pauli strings act by a permutation of
amplitudes (bit flips from X/Y) times a phase vector (from Y/Z); no operator
matrix is ever formed here.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .pauli import HERMITIAN_TOLERANCE, PauliSum, PauliTerm

IMAG_RESIDUE_TOLERANCE = 1e-10


class SimulationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray
    qubit_count: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.qubit_count,):
            raise SimulationError(
                f"expected {1 << self.qubit_count} amplitudes, got shape {amps.shape}"
            )
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = False) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex)
        n = int(round(np.log2(amps.size)))
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(amps, n)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __repr__(self):
        return f"StateVector(qubit_count={self.qubit_count}, norm={self.norm():.12g})"


def basis_state(bits: str) -> StateVector:
    if not bits or set(bits) - {"0", "1"}:
        raise SimulationError(f"invalid bit string {bits!r}")
    amps = np.zeros(1 << len(bits), dtype=complex)
    amps[int(bits, 2)] = 1.0
    return StateVector(amps, len(bits))


@lru_cache(maxsize=4096)
def _pauli_action(axes: str) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(source, phase)`` such that ``(P psi)[c] = phase[c] * psi[source[c]]``."""
    n = len(axes)
    flip = 0
    sign_mask = 0
    n_y = 0
    for q, a in enumerate(axes):
        bit = 1 << (n - 1 - q)
        if a in "XY":
            flip |= bit
        if a in "YZ":
            sign_mask |= bit
        if a == "Y":
            n_y += 1
    idx = np.arange(1 << n)
    source = idx ^ flip
    parity = np.zeros(1 << n, dtype=np.int64)
    masked = source & sign_mask
    while masked.any():
        parity ^= masked & 1
        masked = masked >> 1
    # P|b> = i^{nY} (-1)^{popcount(b & (Y|Z))} |b ^ flip>
    phase = (1j ** n_y) * (1 - 2 * parity)
    source.flags.writeable = False
    phase.flags.writeable = False
    return source, phase


def _check_width(state: StateVector, width: int):
    if width != state.qubit_count:
        raise SimulationError(f"operator acts on {width} qubits, state has {state.qubit_count}")


def _unit_pauli(amps: np.ndarray, axes: str) -> np.ndarray:
    source, phase = _pauli_action(axes)
    return phase * amps[source]


def apply_pauli(state: StateVector, term: PauliTerm) -> StateVector:
    """``coefficient * P |state>``; not norm preserving in general."""
    _check_width(state, term.qubit_count)
    return StateVector(term.coefficient * _unit_pauli(state.amplitudes, term.axes), state.qubit_count)


def _real_coefficient(term: PauliTerm) -> float:
    if term.coefficient.imag != 0.0:
        raise SimulationError(f"exponent term {term.axes} has non-real coefficient {term.coefficient}")
    return term.coefficient.real


def exp_pauli_amplitudes(amps: np.ndarray, axes: str, a: float) -> np.ndarray:
    """exp(-i a P) on a raw amplitude array, using P^2 = I."""
    return np.cos(a) * amps - 1j * np.sin(a) * _unit_pauli(amps, axes)


def apply_pauli_exponential(state: StateVector, term: PauliTerm, angle: float) -> StateVector:
    """``exp(-i * angle * coefficient * P) |state>``."""
    _check_width(state, term.qubit_count)
    a = angle * _real_coefficient(term)
    return StateVector(exp_pauli_amplitudes(state.amplitudes, term.axes, a), state.qubit_count)


class CompiledOperator:
    """Matrix-free action of a PauliSum, with terms grouped by bit-flip pattern.

    Terms sharing a flip pattern act through the same amplitude permutation, so
    their phases are pre-summed into one weight vector per pattern.  Groups and
    terms are accumulated in first-appearance order.
    """

    def __init__(self, h: PauliSum):
        self.qubit_count = h.qubit_count
        self.hermitian = h.is_hermitian()
        groups: dict[int, list] = {}
        for t in h.terms:
            source, phase = _pauli_action(t.axes)
            key = int(source[0])
            if key in groups:
                groups[key][1] = groups[key][1] + t.coefficient * phase
            else:
                groups[key] = [source, t.coefficient * phase]
        self._groups = [(s, w) for s, w in groups.values()]

    def apply(self, amps: np.ndarray) -> np.ndarray:
        out = np.zeros_like(amps, dtype=complex)
        for source, weight in self._groups:
            out += weight * amps[source]
        return out


@lru_cache(maxsize=256)
def compile_operator(h: PauliSum) -> CompiledOperator:
    return CompiledOperator(h)


def apply_sum(state: StateVector, h: PauliSum) -> StateVector:
    _check_width(state, h.qubit_count)
    return StateVector(compile_operator(h).apply(state.amplitudes), state.qubit_count)


def _inner(a: np.ndarray, b: np.ndarray) -> complex:
    # real and imaginary parts from real products, so that swapping a and b gives the
    # exact conjugate (complex multiply may fuse operations asymmetrically)
    ar, ai, br, bi = a.real, a.imag, b.real, b.imag
    re = np.sum(ar * br + ai * bi)
    im = np.sum(ar * bi) - np.sum(ai * br)
    return complex(float(re), float(im))


def expectation_amplitudes(amps: np.ndarray, h: PauliSum) -> float:
    op = compile_operator(h)
    if not op.hermitian:
        raise SimulationError("expectation requires a Hermitian operator")
    value = _inner(amps, op.apply(amps))
    scale = max(1.0, abs(value.real))
    if abs(value.imag) > IMAG_RESIDUE_TOLERANCE * scale:
        raise SimulationError(f"imaginary residue {value.imag:.3e} in expectation value")
    return value.real


def expectation(state: StateVector, h: PauliSum) -> float:
    """<state|H|state> for Hermitian H."""
    _check_width(state, h.qubit_count)
    return expectation_amplitudes(state.amplitudes, h)


def cross_expectation(bra_state: StateVector, h: PauliSum, ket_state: StateVector) -> complex:
    if bra_state.qubit_count != ket_state.qubit_count:
        raise SimulationError("bra and ket qubit counts differ")
    _check_width(ket_state, h.qubit_count)
    return _inner(bra_state.amplitudes, compile_operator(h).apply(ket_state.amplitudes))


def imag_cross_expectation(bra_state: StateVector, h: PauliSum, ket_state: StateVector) -> float:
    """Im <bra|H|ket>: the exact value a Hadamard-test-style circuit would estimate."""
    return cross_expectation(bra_state, h, ket_state).imag


def overlap(a: StateVector, b: StateVector) -> complex:
    if a.qubit_count != b.qubit_count:
        raise SimulationError("qubit counts differ")
    return _inner(a.amplitudes, b.amplitudes)


def overlap_squared(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, the exact value a SWAP test would estimate."""
    return abs(overlap(a, b)) ** 2


__all__ = [
    "HERMITIAN_TOLERANCE",
    "SimulationError",
    "StateVector",
    "apply_pauli",
    "apply_pauli_exponential",
    "apply_sum",
    "basis_state",
    "compile_operator",
    "cross_expectation",
    "expectation",
    "imag_cross_expectation",
    "overlap",
    "overlap_squared",
]
