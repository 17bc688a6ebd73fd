"""Shared-parameter methods: SSVQE and MCVQE
==========================================

SSVQE optimizes one parameter vector for several orthogonal input states at
once, with decreasing weights so the lowest input lands on the lowest level.
MCVQE then diagonalizes H inside the span of the optimized states.
"""
import numpy as np

from tvvqe.harness import config, experiments
from tvvqe.solvers import solve, ssvqe_weights

print("weights for three states:", ssvqe_weights(3))

cfg = config.defaults("h2", "bond_scan")
problems = experiments.build_problem(cfg, 0.74)
exact = problems.exact_levels

for method in ("ssvqe", "mcvqe"):
    run = solve(problems, experiments.method_config(cfg, method, problems))
    print(f"\n{method}: {len(run.states)} states")
    for st, e in zip(run.states, exact):
        print(f"  {st.label:8s} E = {st.energy:.8f}  exact {e:.8f}  log error {st.log_error:6.2f}")
    if run.subspace_matrix is not None:
        m = run.subspace_matrix
        print("  subspace matrix is Hermitian:", np.allclose(m, m.conj().T, atol=1e-10))
