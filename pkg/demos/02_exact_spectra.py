"""Exact spectra as the reference
================================

Every variational result is scored against exact eigenvalues.  Here the
shipped H2 Hamiltonian and a three-site Hubbard chain are diagonalized with
the Jacobi solver, with and without a particle-number and spin sector.
"""
from tvvqe.exact import diagonalize, sector_spectrum
from tvvqe.hamiltonians import HubbardSpec, build_hubbard, load_h2

######################################################################
# H2 at 0.74 angstrom
# -------------------
#
# The full 16-level spectrum mixes particle numbers.  The two-electron,
# S_z = 0 sector holds the four levels that the solvers target.

h2 = load_h2(0.74)
full = diagonalize(h2.hamiltonian)
for e, (n, sz) in list(zip(full.eigenvalues, full.sector_labels))[:6]:
    print(f"{e: .8f} Ha   N = {n:.0f}  Sz = {sz:+.1f}")

sector = sector_spectrum(h2.hamiltonian, electrons=2, sz=0.0)
print("two-electron levels:", [f"{e:.6f}" for e in sector.eigenvalues])

######################################################################
# Hubbard chain
# -------------
#
# With U = 0 a two-site chain is a single hopping bond, so one particle has
# energies -t and +t.  The default three-site chain (t = 0.13 eV, U = 8t) at
# half filling is the system the solvers run on.

dimer = build_hubbard(HubbardSpec(sites=2, hopping_t=1.0, coulomb_u=0.0))
print("dimer, one particle, S_z = +1/2:", sector_spectrum(dimer, 1, 0.5).eigenvalues)

chain = build_hubbard(HubbardSpec())
levels = sector_spectrum(chain, electrons=3, sz=0.5).eigenvalues
print("3x1 chain, N = 3, S_z = +1/2, lowest levels:", [f"{e:.6f}" for e in levels[:3]])
