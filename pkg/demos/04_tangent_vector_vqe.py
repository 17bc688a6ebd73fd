"""Excited states of H2, with and without the tangent phase
==========================================================

VQD finds each state in turn, penalizing overlap with the states already
found.  TVVQE runs the same energy phase with a short budget and then
minimizes the tangent norm plus penalties.  Both use the per-state budgets
from the default H2 configuration.
"""
from tvvqe.exact import sector_spectrum
from tvvqe.harness import config, experiments
from tvvqe.solvers import solve

cfg = config.defaults("h2")
problems = experiments.build_problem(cfg)
print("exact levels:", [f"{e:.6f}" for e in problems.exact_levels])

for method in ("vqd", "tvvqe"):
    run = solve(problems, experiments.method_config(cfg, method, problems))
    print(f"\n{method}")
    for st in run.states:
        start = "" if st.tangent_start is None else f"  tangent phase from point {st.tangent_start}"
        print(f"  {st.label:8s} {st.occupation}  E = {st.energy:.10f}  log error = {st.log_error:6.2f}{start}")

######################################################################
# The trace of one state
# ----------------------
#
# Each record holds the energy and tangent norm after one BFGS step.  In the
# tangent phase both fall together, which is what the scatter experiment
# quantifies.

run = solve(problems, experiments.method_config(cfg, "tvvqe", problems))
for rec in run.states[2].records:
    print(f"  {rec.iteration:3d} {rec.phase:7s} tangent norm {rec.tangent_norm:9.2e}  log error {rec.log_error:6.2f}")
