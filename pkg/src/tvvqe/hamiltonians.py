"""Benchmark Hamiltonians: file-backed molecular systems and the open-chain Hubbard model.

Spin-orbital layout throughout: mode ``2i`` is spatial orbital (or site) ``i``
spin up, mode ``2i + 1`` is spin down.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .pauli import (
    FermionicOperator,
    PauliError,
    PauliSum,
    format_pauli_sum,
    jordan_wigner,
    parse_pauli_sum,
    simplify,
)


class HamiltonianError(ValueError):
    pass


@dataclass(frozen=True)
class HubbardSpec:
    sites: int = 3
    hopping_t: float = 0.13
    coulomb_u: float = 8 * 0.13
    geometry: str = "open"

    @property
    def qubit_count(self) -> int:
        return 2 * self.sites

    @property
    def bonds(self) -> list[tuple[int, int]]:
        return [(i, i + 1) for i in range(self.sites - 1)]


@dataclass(frozen=True)
class MolecularSystem:
    label: str
    bond_length: float
    hamiltonian: PauliSum
    electron_count: int
    qubit_count: int
    units: str = "hartree"
    metadata: dict = field(default_factory=dict, compare=False)


def build_hubbard(spec: HubbardSpec) -> PauliSum:
    """H = -t sum_<ij>,s (a+_is a_js + h.c.) + U sum_i n_i,up n_i,down, Jordan-Wigner mapped."""
    if spec.sites < 2:
        raise HamiltonianError("Hubbard chain needs at least 2 sites")
    if spec.geometry != "open":
        raise HamiltonianError("only the open 1D chain is supported")
    terms = []
    t, u = complex(spec.hopping_t), complex(spec.coulomb_u)
    for i, j in spec.bonds:
        for s in (0, 1):
            p, q = 2 * i + s, 2 * j + s
            terms.append((-t, ((p, True), (q, False))))
            terms.append((-t, ((q, True), (p, False))))
    for i in range(spec.sites):
        up, dn = 2 * i, 2 * i + 1
        terms.append((u, ((up, True), (up, False), (dn, True), (dn, False))))
    h = jordan_wigner(FermionicOperator(tuple(terms)), spec.qubit_count)
    return _validated(h, "Hubbard")


def number_operator(qubit_count: int) -> PauliSum:
    op = FermionicOperator(tuple((1.0 + 0j, ((p, True), (p, False))) for p in range(qubit_count)))
    return jordan_wigner(op, qubit_count).real()


def sz_operator(qubit_count: int) -> PauliSum:
    op = FermionicOperator(
        tuple((0.5 if p % 2 == 0 else -0.5, ((p, True), (p, False))) for p in range(qubit_count))
    )
    return jordan_wigner(op, qubit_count).real()


def _validated(h: PauliSum, what: str) -> PauliSum:
    h = simplify(h)
    if not h.is_hermitian():
        bad = [t.axes for t in h.terms if abs(t.coefficient.imag) > 1e-10]
        raise HamiltonianError(f"{what} Hamiltonian is not Hermitian (imaginary terms on {bad[:3]})")
    return h.real()


_HEADER_KV = re.compile(r"(\w+)=(\S+)")


def parse_header(comments: list[str]) -> dict[str, str]:
    meta: dict[str, str] = {}
    for line in comments:
        for key, value in _HEADER_KV.findall(line):
            meta.setdefault(key, value)
    return meta


def load_molecular_text(text: str, source: str = "<string>") -> MolecularSystem:
    try:
        h, comments = parse_pauli_sum(text, source)
    except PauliError as exc:
        raise HamiltonianError(str(exc)) from None
    meta = parse_header(comments)
    # Hermiticity is judged on the raw terms; merging first would hide nothing here
    h = _validated(h, source)
    try:
        label = meta.get("label", Path(source).stem)
        r = float(meta.get("r", "nan"))
        electrons = int(meta["electrons"])
    except (KeyError, ValueError) as exc:
        raise HamiltonianError(f"{source}: header needs label, r and electrons ({exc})") from None
    return MolecularSystem(
        label=label,
        bond_length=r,
        hamiltonian=h,
        electron_count=electrons,
        qubit_count=h.qubit_count,
        units=meta.get("units", "hartree"),
        metadata=meta,
    )


def load_molecular(path) -> MolecularSystem:
    path = Path(path)
    return load_molecular_text(path.read_text(), str(path))


def serialize_molecular(system: MolecularSystem) -> str:
    header = [
        f"label={system.label} r={system.bond_length!r} electrons={system.electron_count} units={system.units}"
    ]
    extra = {k: v for k, v in system.metadata.items() if k not in {"label", "r", "electrons", "units"}}
    if extra:
        header.append(" ".join(f"{k}={v}" for k, v in extra.items()))
    return format_pauli_sum(system.hamiltonian, header)


# ---------------------------------------------------------------------------
# bundled data
# ---------------------------------------------------------------------------

H2_GRID = tuple(round(0.1 * k, 1) for k in range(1, 26))


def data_dir() -> Path:
    return Path(str(resources.files("tvvqe") / "data"))


def h2_path(r: float, directory=None) -> Path:
    return Path(directory or data_dir()) / f"h2_r{r:.2f}.txt"


def load_h2(r: float, directory=None) -> MolecularSystem:
    return load_molecular(h2_path(r, directory))


def load_lih(directory=None) -> MolecularSystem:
    return load_molecular(Path(directory or data_dir()) / "lih_active_r1.60.txt")


def list_data(directory=None) -> list[Path]:
    return sorted(Path(directory or data_dir()).glob("*.txt"))
