"""Exact diagonalization: dense Pauli matrices, cyclic Jacobi, log errors.

Everything here is the reference standard the variational solvers are scored
against, so it is deliberately independent of the matrix-free simulator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .pauli import PauliSum

MAX_QUBITS = 10
JACOBI_TOLERANCE = 1e-12
LOG_ERROR_FLOOR = -16.0

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class OracleError(ValueError):
    pass


@dataclass
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, in the full 2^n basis
    sector_labels: list[tuple[float, float]] | None = None

    def __len__(self):
        return len(self.eigenvalues)


def pauli_matrix(axes: str) -> np.ndarray:
    return reduce(np.kron, (_SINGLE[a] for a in axes))


def dense_matrix(h: PauliSum) -> np.ndarray:
    if h.qubit_count > MAX_QUBITS:
        raise OracleError(f"{h.qubit_count} qubits exceeds the dense cap of {MAX_QUBITS}")
    dim = 1 << h.qubit_count
    m = np.zeros((dim, dim), dtype=complex)
    for t in h.terms:
        m += t.coefficient * pauli_matrix(t.axes)
    return m


def jacobi_eigh(a: np.ndarray, tol: float = JACOBI_TOLERANCE, max_sweeps: int = 100):
    """Cyclic Jacobi eigendecomposition of a Hermitian matrix.

    Each (p, q) rotation first removes the phase of ``a[p, q]`` and then
    applies the real symmetric Jacobi rotation that annihilates it.  Sweeps
    stop once the off-diagonal Frobenius norm drops below ``tol * max(1, ||a||_F)``.
    Returns ascending eigenvalues and the matching unitary of eigenvector columns.
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise OracleError("matrix must be square")
    if not np.allclose(a, a.conj().T, atol=1e-12, rtol=0):
        raise OracleError("matrix is not Hermitian")
    v = np.eye(n, dtype=complex)
    threshold = tol * max(1.0, np.linalg.norm(a))

    off_mask = ~np.eye(n, dtype=bool)

    def off_norm():
        return float(np.linalg.norm(a[off_mask]))

    for _ in range(max_sweeps):
        if off_norm() < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r < 1e-300 or r < threshold * 1e-4 / n:
                    continue
                phase = apq / r
                app, aqq = a[p, p].real, a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # U = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                u = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ u
                a[idx, :] = u.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ u
    else:
        raise OracleError("Jacobi iteration did not converge")
    w = np.diag(a).real
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def _labels(vectors: np.ndarray, qubit_count: int) -> list[tuple[float, float]]:
    occ = occupations(qubit_count)
    n_diag = occ.sum(axis=1).astype(float)
    sz_diag = 0.5 * (occ[:, 0::2].sum(axis=1) - occ[:, 1::2].sum(axis=1))
    probs = np.abs(vectors) ** 2
    return [(float(n_diag @ probs[:, k]), float(sz_diag @ probs[:, k])) for k in range(vectors.shape[1])]


def diagonalize(h: PauliSum, label_sectors: bool = True) -> Spectrum:
    if not h.is_hermitian():
        raise OracleError("diagonalize requires a Hermitian PauliSum")
    w, v = jacobi_eigh(dense_matrix(h))
    labels = _labels(v, h.qubit_count) if label_sectors else None
    return Spectrum(w, v, labels)


def occupations(qubit_count: int) -> np.ndarray:
    """Row b holds the occupation bits of basis index b, qubit 0 first."""
    idx = np.arange(1 << qubit_count)
    shifts = np.arange(qubit_count - 1, -1, -1)
    return (idx[:, None] >> shifts) & 1


def sector_indices(qubit_count: int, electrons: int | None = None, sz: float | None = None) -> np.ndarray:
    """Basis indices with the given particle number and S_z (even modes spin up)."""
    occ = occupations(qubit_count)
    keep = np.ones(len(occ), dtype=bool)
    if electrons is not None:
        keep &= occ.sum(axis=1) == electrons
    if sz is not None:
        s = 0.5 * (occ[:, 0::2].sum(axis=1) - occ[:, 1::2].sum(axis=1))
        keep &= np.isclose(s, sz)
    return np.flatnonzero(keep)


def sector_spectrum(h: PauliSum, electrons: int | None = None, sz: float | None = None) -> Spectrum:
    """Spectrum of ``h`` restricted to one (N, S_z) block of the computational basis.

    Valid when ``h`` conserves both quantities; eigenvectors are embedded back
    into the full space.
    """
    if not h.is_hermitian():
        raise OracleError("sector_spectrum requires a Hermitian PauliSum")
    idx = sector_indices(h.qubit_count, electrons, sz)
    if idx.size == 0:
        raise OracleError(f"empty sector N={electrons}, Sz={sz}")
    m = dense_matrix(h)
    w, vs = jacobi_eigh(m[np.ix_(idx, idx)])
    full = np.zeros((m.shape[0], idx.size), dtype=complex)
    full[idx, :] = vs
    return Spectrum(w, full, _labels(full, h.qubit_count))


def log_error(e_calc: float, e_exact: float) -> float:
    diff = abs(e_calc - e_exact)
    if diff == 0.0:
        return LOG_ERROR_FLOOR
    return max(LOG_ERROR_FLOOR, math.log10(diff))
