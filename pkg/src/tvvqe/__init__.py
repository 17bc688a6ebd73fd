"""Tangent-vector VQE laboratory on an exact statevector simulator."""
