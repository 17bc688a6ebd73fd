from functools import reduce

import numpy as np
import pytest

from tvvqe.exact import sector_spectrum
from tvvqe.hamiltonians import load_h2

# dense single-qubit matrices, kept here so tests do not lean on the oracle module
PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1.0, -1.0]).astype(complex),
}


def kron_matrix(axes):
    return reduce(np.kron, [PAULI[a] for a in axes])


def sum_matrix(s):
    return sum(t.coefficient * kron_matrix(t.axes) for t in s.terms)


def ladder_matrix(p, n, creation):
    """Jordan-Wigner ladder operator built directly from 2x2 blocks (qubit 0 leftmost)."""
    lower = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1| removes an occupation
    op = lower.conj().T if creation else lower
    mats = [PAULI["Z"]] * p + [op] + [PAULI["I"]] * (n - p - 1)
    return reduce(np.kron, mats)


@pytest.fixture(scope="session")
def h2():
    return load_h2(0.74)


@pytest.fixture(scope="session")
def h2_levels(h2):
    return tuple(sector_spectrum(h2.hamiltonian, 2, 0.0).eigenvalues)


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    def report(number: int, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
