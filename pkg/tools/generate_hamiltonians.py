"""Regenerate the bundled molecular qubit Hamiltonians.

Integrals come from pyscf (RHF, STO-3G); the second-quantized Hamiltonian is
mapped with ``tvvqe.pauli.jordan_wigner`` using spin-orbital 2i = orbital i
alpha, 2i + 1 = orbital i beta.  pyscf is only needed to run this script; the
package itself reads the text files.

    python tools/generate_hamiltonians.py [outdir]
"""
from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
from pyscf import ao2mo, gto, scf

from tvvqe.hamiltonians import H2_GRID, MolecularSystem, serialize_molecular
from tvvqe.pauli import FermionicOperator, jordan_wigner

LIH_R = 1.60
LIH_FROZEN = [0]
LIH_ACTIVE = [1, 2]


def spin_orbital_hamiltonian(constant: float, h1: np.ndarray, eri: np.ndarray) -> FermionicOperator:
    """constant + sum h_pq a+_p a_q + 1/2 sum (pq|rs) a+_p a+_r a_s a_q over spin orbitals."""
    norb = h1.shape[0]
    terms = [(complex(constant), ())]
    for p in range(norb):
        for q in range(norb):
            if abs(h1[p, q]) < 1e-14:
                continue
            for s in (0, 1):
                terms.append((complex(h1[p, q]), ((2 * p + s, True), (2 * q + s, False))))
    for p in range(norb):
        for q in range(norb):
            for r in range(norb):
                for t in range(norb):
                    v = eri[p, q, r, t]
                    if abs(v) < 1e-14:
                        continue
                    for s1 in (0, 1):
                        for s2 in (0, 1):
                            a, b, c, d = 2 * p + s1, 2 * r + s2, 2 * t + s2, 2 * q + s1
                            if a == b or c == d:
                                continue
                            terms.append((complex(0.5 * v), ((a, True), (b, True), (c, False), (d, False))))
    return FermionicOperator(tuple(terms))


def molecular_integrals(atom: str, frozen=(), active=None):
    mol = gto.M(atom=atom, basis="sto-3g", unit="Angstrom", verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    if not mf.converged:
        raise RuntimeError(f"RHF did not converge for {atom}")
    c = mf.mo_coeff
    h_ao = mf.get_hcore()
    eri_mo = ao2mo.restore(1, ao2mo.kernel(mol, c), c.shape[1])
    h_mo = c.T @ h_ao @ c
    nmo = c.shape[1]
    active = list(range(nmo)) if active is None else list(active)
    frozen = list(frozen)
    constant = mol.energy_nuc()
    for i in frozen:
        constant += 2 * h_mo[i, i]
        for j in frozen:
            constant += 2 * eri_mo[i, i, j, j] - eri_mo[i, j, j, i]
    h_eff = h_mo[np.ix_(active, active)].copy()
    for i in frozen:
        h_eff += 2 * eri_mo[np.ix_(active, active, [i], [i])][:, :, 0, 0]
        h_eff -= eri_mo[np.ix_(active, [i], [i], active)][:, 0, 0, :]
    eri_act = eri_mo[np.ix_(active, active, active, active)]
    electrons = mol.nelectron - 2 * len(frozen)
    return constant, h_eff, eri_act, electrons, mf.e_tot, mf.mo_energy


def build(label: str, r: float, atom: str, **kw) -> MolecularSystem:
    constant, h1, eri, electrons, e_hf, mo_e = molecular_integrals(atom, **kw)
    nq = 2 * h1.shape[0]
    h = jordan_wigner(spin_orbital_hamiltonian(constant, h1, eri), nq)
    if not h.is_hermitian():
        raise RuntimeError("generated Hamiltonian is not Hermitian")
    meta = {"basis": "sto-3g", "source": "pyscf-rhf+jordan-wigner", "e_hf": f"{e_hf:.12f}"}
    if "active" in kw:
        meta["active"] = ",".join(map(str, kw["active"]))
        meta["frozen"] = ",".join(map(str, kw.get("frozen", ())))
    return MolecularSystem(label, r, h.real(), electrons, nq, "hartree", meta)


def main(outdir: Path):
    outdir.mkdir(parents=True, exist_ok=True)
    for r in sorted(set(H2_GRID) | {0.74}):
        system = build("H2", r, f"H 0 0 0; H 0 0 {r}")
        (outdir / f"h2_r{r:.2f}.txt").write_text(serialize_molecular(system))
    lih = build("LiH", LIH_R, f"Li 0 0 0; H 0 0 {LIH_R}", frozen=LIH_FROZEN, active=LIH_ACTIVE)
    (outdir / f"lih_active_r{LIH_R:.2f}.txt").write_text(serialize_molecular(lih))


if __name__ == "__main__":
    default = Path(__file__).resolve().parents[1] / "src" / "tvvqe" / "data"
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else default)
