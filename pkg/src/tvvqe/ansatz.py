"""Trotterized unitary coupled-cluster ansatz and its derivative insertions.

U(theta) is a product of Pauli exponentials exp(-i (theta_l / n) c_k P_k),
applied block by block (one block per variable) and repeated ``n`` times with
shared parameters.  A derivative slot marks one factor containing theta_l; the
derivative operator for that slot replays the same product with the bare
Pauli ``(c_k / n) P_k`` inserted just before that factor.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .pauli import FermionicOperator, PauliTerm, jordan_wigner
from .statevector import StateVector, _unit_pauli, exp_pauli_amplitudes


class AnsatzError(ValueError):
    pass


class Factor(NamedTuple):
    """exp(-i * angle * P) with angle = theta[variable] * scaled_coefficient."""

    repetition: int
    variable: int
    term: int
    axes: str
    scaled_coefficient: float
    angle: float


@dataclass(frozen=True)
class VariableBlock:
    variable_index: int
    pauli_terms: tuple[PauliTerm, ...]
    label: str = ""


@dataclass(frozen=True)
class UccAnsatz:
    blocks: tuple[VariableBlock, ...]
    qubit_count: int
    trotter_depth: int = 2

    def __post_init__(self):
        if self.trotter_depth < 1:
            raise AnsatzError("trotter_depth must be >= 1")
        for i, b in enumerate(self.blocks):
            if b.variable_index != i:
                raise AnsatzError("block variable indices must be 0..d-1 in order")

    @property
    def parameter_count(self) -> int:
        return len(self.blocks)

    def factors(self, theta) -> list[Factor]:
        """Flat factor sequence in application order."""
        theta = self._check_theta(theta)
        n = self.trotter_depth
        out = []
        for rep in range(n):
            for b in self.blocks:
                for k, t in enumerate(b.pauli_terms):
                    c = t.coefficient.real / n
                    out.append(Factor(rep, b.variable_index, k, t.axes, c, theta[b.variable_index] * c))
        return out

    def _check_theta(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float).reshape(-1)
        if theta.size != self.parameter_count:
            raise AnsatzError(f"expected {self.parameter_count} parameters, got {theta.size}")
        return theta


@dataclass(frozen=True)
class DerivativeSlot:
    variable_index: int
    repetition: int
    term_index: int
    inserted_term: PauliTerm


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def _spin(mode: int) -> int:
    return mode % 2


def excitations(reference_occupation: str) -> tuple[list[tuple[int, int]], list[tuple[int, int, int, int]]]:
    """Spin-conserving singles ``(i, a)`` and doubles ``(i, j, a, b)`` out of the reference."""
    occ = [p for p, c in enumerate(reference_occupation) if c == "1"]
    vir = [p for p, c in enumerate(reference_occupation) if c == "0"]
    singles = [(i, a) for i in occ for a in vir if _spin(i) == _spin(a)]
    doubles = []
    for i, j in combinations(occ, 2):
        for a, b in combinations(vir, 2):
            if sorted((_spin(i), _spin(j))) == sorted((_spin(a), _spin(b))):
                doubles.append((i, j, a, b))
    return singles, doubles


def generator_terms(excitation: Sequence[int], qubit_count: int) -> tuple[PauliTerm, ...]:
    """Pauli expansion of G = i (tau - tau^dag), so that exp(theta (tau - tau^dag)) = exp(-i theta G).

    ``excitation`` is ``(i, a)`` for a_a^dag a_i or ``(i, j, a, b)`` for
    a_b^dag a_a^dag a_j a_i.  Terms are real-coefficient and sorted by axes.
    """
    if len(excitation) == 2:
        i, a = excitation
        ops = ((a, True), (i, False))
    elif len(excitation) == 4:
        i, j, a, b = excitation
        ops = ((b, True), (a, True), (j, False), (i, False))
    else:
        raise AnsatzError(f"unsupported excitation {excitation}")
    tau = FermionicOperator.term(1.0, *ops)
    g = jordan_wigner((tau - tau.adjoint()).scaled(1j), qubit_count)
    terms = []
    for t in g.terms:
        if abs(t.coefficient.imag) > 1e-12:
            raise AnsatzError(f"generator for {excitation} is not Hermitian")
        terms.append(PauliTerm(t.coefficient.real, t.axes))
    if not terms:
        raise AnsatzError(f"excitation {excitation} has an empty generator")
    return tuple(sorted(terms, key=lambda t: t.axes))


def _label(exc: Sequence[int]) -> str:
    half = len(exc) // 2
    return "".join(map(str, exc[:half])) + "->" + "".join(map(str, exc[half:]))


def _qubits_of(system) -> int:
    if isinstance(system, int):
        return system
    return int(system.qubit_count)


def build_uccsd(system, reference_occupation: str, trotter_depth: int = 2) -> UccAnsatz:
    """UCCSD with one block per spin-conserving single and double excitation of the reference.

    ``system`` may be a qubit count or anything exposing ``qubit_count``.
    """
    n = _qubits_of(system)
    if len(reference_occupation) != n or set(reference_occupation) - {"0", "1"}:
        raise AnsatzError(f"reference {reference_occupation!r} does not match {n} qubits")
    if "1" not in reference_occupation or "0" not in reference_occupation:
        raise AnsatzError(f"reference {reference_occupation!r} has no occupied or no virtual modes")
    singles, doubles = excitations(reference_occupation)
    return from_excitations(n, singles + doubles, trotter_depth)


def from_excitations(qubit_count: int, excs: Iterable[Sequence[int]], trotter_depth: int = 2) -> UccAnsatz:
    blocks = [
        VariableBlock(k, generator_terms(e, qubit_count), _label(e)) for k, e in enumerate(excs)
    ]
    return UccAnsatz(tuple(blocks), qubit_count, trotter_depth)


def build_shared_uccsd(system, references: Sequence[str], trotter_depth: int = 2) -> UccAnsatz:
    """Union of the UCCSD pools of several references, one block per distinct generator.

    Reversed excitations (a->i versus i->a) give the same generator up to sign and
    are kept once, in first-appearance order.
    """
    n = _qubits_of(system)
    seen: set[tuple] = set()
    pool = []
    for ref in references:
        build_uccsd(n, ref)  # validation
        singles, doubles = excitations(ref)
        for e in singles + doubles:
            terms = generator_terms(e, n)
            # doubles on the same four modes share axes and differ only in signs
            sign = 1.0 if terms[0].coefficient.real > 0 else -1.0
            key = tuple((t.axes, round(sign * t.coefficient.real, 12)) for t in terms)
            if key not in seen:
                seen.add(key)
                pool.append(e)
    return from_excitations(n, pool, trotter_depth)


# ---------------------------------------------------------------------------
# application
# ---------------------------------------------------------------------------

def prepare_amplitudes(ansatz: UccAnsatz, theta, amps: np.ndarray) -> np.ndarray:
    for f in ansatz.factors(theta):
        amps = exp_pauli_amplitudes(amps, f.axes, f.angle)
    return amps


def prepare_state(ansatz: UccAnsatz, theta, initial: StateVector) -> StateVector:
    if initial.qubit_count != ansatz.qubit_count:
        raise AnsatzError("initial state and ansatz qubit counts differ")
    return StateVector(prepare_amplitudes(ansatz, theta, initial.amplitudes), ansatz.qubit_count)


def derivative_slots(ansatz: UccAnsatz, m: int) -> list[DerivativeSlot]:
    if not 0 <= m < ansatz.parameter_count:
        raise AnsatzError(f"variable index {m} out of range")
    n = ansatz.trotter_depth
    block = ansatz.blocks[m]
    return [
        DerivativeSlot(m, rep, k, PauliTerm(t.coefficient / n, t.axes))
        for rep in range(n)
        for k, t in enumerate(block.pauli_terms)
    ]


def apply_derivative_operator(ansatz: UccAnsatz, theta, slot: DerivativeSlot, initial: StateVector) -> StateVector:
    """V_slot(theta)|initial>: the prepare_state product with the slot's bare Pauli inserted."""
    if initial.qubit_count != ansatz.qubit_count:
        raise AnsatzError("initial state and ansatz qubit counts differ")
    amps = initial.amplitudes
    for f in ansatz.factors(theta):
        if (f.repetition, f.variable, f.term) == (slot.repetition, slot.variable_index, slot.term_index):
            amps = slot.inserted_term.coefficient * _unit_pauli(amps, slot.inserted_term.axes)
        amps = exp_pauli_amplitudes(amps, f.axes, f.angle)
    return StateVector(amps, ansatz.qubit_count)
