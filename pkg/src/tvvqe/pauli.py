"""Pauli-string algebra and the Jordan-Wigner mapping.

Qubit 0 is the leftmost character of an axes string, so ``"XI"`` acts with X
on qubit 0.  Fermionic mode ``p`` maps onto qubit ``p`` and carries a Z string
over every lower mode.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

DROP_TOLERANCE = 1e-12
HERMITIAN_TOLERANCE = 1e-10

_AXES = frozenset("IXYZ")

# single-qubit products: (a, b) -> (phase, a*b)
_PRODUCT = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}


class PauliError(ValueError):
    pass


@dataclass(frozen=True)
class PauliTerm:
    coefficient: complex
    axes: str

    def __post_init__(self):
        if not set(self.axes) <= _AXES:
            raise PauliError(f"invalid Pauli axes {self.axes!r}")
        object.__setattr__(self, "coefficient", complex(self.coefficient))

    @property
    def qubit_count(self) -> int:
        return len(self.axes)

    def is_identity(self) -> bool:
        return set(self.axes) <= {"I"}

    def scaled(self, factor: complex) -> "PauliTerm":
        return PauliTerm(self.coefficient * factor, self.axes)

    def __mul__(self, other):
        if isinstance(other, PauliTerm):
            return multiply(self, other)
        return self.scaled(other)

    __rmul__ = scaled

    def __str__(self):
        return f"{self.coefficient:+.6g} {self.axes}"


def multiply(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """Operator product ``a @ b`` with the accumulated phase folded into the coefficient."""
    if len(a.axes) != len(b.axes):
        raise PauliError(f"axes length mismatch: {len(a.axes)} vs {len(b.axes)}")
    phase = 1 + 0j
    out = []
    for p, q in zip(a.axes, b.axes):
        ph, r = _PRODUCT[p, q]
        phase *= ph
        out.append(r)
    return PauliTerm(a.coefficient * b.coefficient * phase, "".join(out))


@dataclass(frozen=True)
class PauliSum:
    terms: tuple[PauliTerm, ...]
    qubit_count: int

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.qubit_count < 1:
            raise PauliError("qubit_count must be positive")
        for t in self.terms:
            if t.qubit_count != self.qubit_count:
                raise PauliError(
                    f"term {t.axes!r} has {t.qubit_count} qubits, expected {self.qubit_count}"
                )

    @classmethod
    def from_terms(cls, terms: Iterable[PauliTerm], qubit_count: int | None = None) -> "PauliSum":
        terms = tuple(terms)
        if qubit_count is None:
            if not terms:
                raise PauliError("cannot infer qubit_count from an empty term list")
            qubit_count = terms[0].qubit_count
        return cls(terms, qubit_count)

    @classmethod
    def identity(cls, qubit_count: int, coefficient: complex = 1.0) -> "PauliSum":
        return cls((PauliTerm(coefficient, "I" * qubit_count),), qubit_count)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if other.qubit_count != self.qubit_count:
            raise PauliError("qubit count mismatch")
        return PauliSum(self.terms + other.terms, self.qubit_count)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + other.scaled(-1)

    def scaled(self, factor: complex) -> "PauliSum":
        return PauliSum(tuple(t.scaled(factor) for t in self.terms), self.qubit_count)

    def __mul__(self, other):
        if isinstance(other, PauliSum):
            if other.qubit_count != self.qubit_count:
                raise PauliError("qubit count mismatch")
            prods = [multiply(a, b) for a in self.terms for b in other.terms]
            return simplify(PauliSum(prods, self.qubit_count))
        return self.scaled(other)

    __rmul__ = scaled

    def adjoint(self) -> "PauliSum":
        return PauliSum(
            tuple(PauliTerm(t.coefficient.conjugate(), t.axes) for t in self.terms),
            self.qubit_count,
        )

    def is_hermitian(self, tol: float = HERMITIAN_TOLERANCE) -> bool:
        return all(abs(t.coefficient.imag) <= tol for t in simplify(self).terms)

    def real(self) -> "PauliSum":
        """Drop imaginary coefficient parts; only for validated Hermitian sums."""
        return PauliSum(tuple(PauliTerm(t.coefficient.real, t.axes) for t in self.terms), self.qubit_count)

    def constant(self) -> complex:
        return sum((t.coefficient for t in self.terms if t.is_identity()), 0j)


def simplify(s: PauliSum, tol: float = DROP_TOLERANCE) -> PauliSum:
    """Merge like terms (first-appearance order) and drop ``|c| < tol``."""
    merged: dict[str, complex] = {}
    for t in s.terms:
        merged[t.axes] = merged.get(t.axes, 0j) + t.coefficient
    kept = tuple(PauliTerm(c, ax) for ax, c in merged.items() if abs(c) >= tol)
    return PauliSum(kept, s.qubit_count)


# ---------------------------------------------------------------------------
# fermions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FermionicOperator:
    """Polynomial in ladder operators.

    Each term is ``(coefficient, ((mode, is_creation), ...))`` with the ladder
    operators written left to right as they appear in the product.
    """

    terms: tuple[tuple[complex, tuple[tuple[int, bool], ...]], ...]

    @classmethod
    def term(cls, coefficient: complex, *ops: tuple[int, bool]) -> "FermionicOperator":
        return cls(((complex(coefficient), tuple(ops)),))

    def __add__(self, other: "FermionicOperator") -> "FermionicOperator":
        return FermionicOperator(self.terms + other.terms)

    def __sub__(self, other: "FermionicOperator") -> "FermionicOperator":
        return self + other.scaled(-1)

    def scaled(self, factor: complex) -> "FermionicOperator":
        return FermionicOperator(tuple((c * factor, ops) for c, ops in self.terms))

    def adjoint(self) -> "FermionicOperator":
        return FermionicOperator(
            tuple(
                (c.conjugate(), tuple((m, not cr) for m, cr in reversed(ops)))
                for c, ops in self.terms
            )
        )

    def max_mode(self) -> int:
        return max((m for _, ops in self.terms for m, _ in ops), default=-1)


def create(p: int) -> FermionicOperator:
    return FermionicOperator.term(1.0, (p, True))


def annihilate(p: int) -> FermionicOperator:
    return FermionicOperator.term(1.0, (p, False))


def _ladder_image(mode: int, creation: bool, n: int) -> PauliSum:
    z = "Z" * mode
    tail = "I" * (n - mode - 1)
    sign = -0.5j if creation else 0.5j
    return PauliSum(
        (PauliTerm(0.5, z + "X" + tail), PauliTerm(sign, z + "Y" + tail)), n
    )


def jordan_wigner(op: FermionicOperator, qubit_count: int) -> PauliSum:
    """Jordan-Wigner image: a_p^dag -> Z_0..Z_{p-1} (X_p - iY_p)/2."""
    if op.max_mode() >= qubit_count:
        raise PauliError(f"mode {op.max_mode()} out of range for {qubit_count} qubits")
    for _, ops in op.terms:
        for m, _ in ops:
            if m < 0:
                raise PauliError(f"negative mode index {m}")
    out: list[PauliTerm] = []
    for coeff, ops in op.terms:
        acc = PauliSum.identity(qubit_count, coeff)
        for mode, creation in ops:
            acc = acc * _ladder_image(mode, creation, qubit_count)
        out.extend(acc.terms)
    return simplify(PauliSum(tuple(out), qubit_count))


def number_operator(modes: Sequence[int], qubit_count: int) -> PauliSum:
    op = FermionicOperator(tuple((1.0 + 0j, ((p, True), (p, False))) for p in modes))
    return jordan_wigner(op, qubit_count)


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

def format_pauli_sum(s: PauliSum, header: Sequence[str] = ()) -> str:
    lines = [f"# {h}" for h in header]
    for t in s.terms:
        lines.append(f"{t.coefficient.real!r} {t.coefficient.imag!r} {t.axes}")
    return "\n".join(lines) + "\n"


def parse_pauli_sum(text: str, source: str = "<string>") -> tuple[PauliSum, list[str]]:
    """Parse ``<real> <imag> <axes>`` lines; returns the sum and the comment lines."""
    comments: list[str] = []
    terms: list[PauliTerm] = []
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        parts = line.split()
        if len(parts) != 3:
            raise PauliError(f"{source}:{lineno}: expected '<real> <imag> <axes>', got {raw!r}")
        try:
            re_, im_ = float(parts[0]), float(parts[1])
        except ValueError:
            raise PauliError(f"{source}:{lineno}: bad coefficient in {raw!r}") from None
        axes = parts[2]
        if not set(axes) <= _AXES:
            raise PauliError(f"{source}:{lineno}: bad axes {axes!r}")
        if width is None:
            width = len(axes)
        elif len(axes) != width:
            raise PauliError(
                f"{source}:{lineno}: inconsistent qubit count {len(axes)} (expected {width})"
            )
        terms.append(PauliTerm(complex(re_, im_), axes))
    if not terms:
        raise PauliError(f"{source}: no terms")
    return PauliSum(tuple(terms), width), comments
