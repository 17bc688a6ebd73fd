"""Three routes to the same gradient
==================================

The tangent-vector objective is built from energy gradients, so they have to
be right.  We compute one gradient three ways: the adjoint sweep used by the
optimizers, the sum over derivative slots (one Hadamard-test value per slot),
and central finite differences.
"""
import numpy as np

from tvvqe.ansatz import build_uccsd
from tvvqe.hamiltonians import load_h2
from tvvqe.objectives import (
    StateProblem,
    analytic_gradient,
    analytic_gradient_by_slots,
    fdm_gradient,
    tangent_norm,
)
from tvvqe.statevector import basis_state

h2 = load_h2(0.74)
ansatz = build_uccsd(h2, "1100")
problem = StateProblem(h2.hamiltonian, ansatz, basis_state("1100"))
print("variables:", [b.label for b in ansatz.blocks])

rng = np.random.default_rng(0)
theta = rng.uniform(-np.pi, np.pi, ansatz.parameter_count)

adjoint = analytic_gradient(problem, theta)
slots = analytic_gradient_by_slots(problem, theta)
fdm = fdm_gradient(problem, theta, step=1e-5)
print("adjoint :", adjoint)
print("slots   :", slots)
print("FDM     :", fdm)
print("max |adjoint - FDM| =", np.max(np.abs(adjoint - fdm)))

######################################################################
# The tangent norm
# ----------------
#
# The L1 norm of this gradient vanishes at every eigenstate the ansatz can
# reach.  At the Hartree-Fock point it is small but not zero, because the
# double excitation still lowers the energy.

print("tangent norm at theta = 0:", tangent_norm(problem, np.zeros(3)))
print("tangent norm at random theta:", tangent_norm(problem, theta))
