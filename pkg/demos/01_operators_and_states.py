"""Pauli strings, fermions and statevectors
==========================================

Everything in this package is built from two small pieces: an algebra of
Pauli strings and a dense statevector that those strings act on.  This demo
walks through both, then maps a fermionic operator to qubits.
"""
import numpy as np

from tvvqe.pauli import FermionicOperator, PauliSum, PauliTerm, format_pauli_sum, jordan_wigner, multiply
from tvvqe.statevector import apply_pauli_exponential, basis_state, expectation

######################################################################
# Products of Pauli strings
# -------------------------
#
# A product of two strings is another string times a phase.  XY = iZ on one
# qubit, and the phases of each qubit multiply.

print(multiply(PauliTerm(1, "X"), PauliTerm(1, "Y")))
print(multiply(PauliTerm(1, "XZ"), PauliTerm(1, "YX")))

######################################################################
# From fermions to qubits
# -----------------------
#
# Under the Jordan-Wigner mapping, mode p becomes qubit p with a string of Z
# on every lower mode.  The hopping term a+_0 a_2 + h.c. on four modes shows
# the Z on qubit 1 between the two ends.

hop = FermionicOperator.term(1.0, (0, True), (2, False))
hop = hop + hop.adjoint()
print(format_pauli_sum(jordan_wigner(hop, 4)))

######################################################################
# Acting on states
# ----------------
#
# Kets are written with qubit 0 on the left, so |1100> has modes 0 and 1
# filled.  Rotating |0> about X by theta gives <Z> = cos(2 theta).

z = PauliSum.from_terms([PauliTerm(1, "Z")])
for theta in (0.0, np.pi / 8, np.pi / 4):
    psi = apply_pauli_exponential(basis_state("0"), PauliTerm(1, "X"), theta)
    print(f"theta = {theta:.3f}  <Z> = {expectation(psi, z):+.6f}  cos(2 theta) = {np.cos(2 * theta):+.6f}")
