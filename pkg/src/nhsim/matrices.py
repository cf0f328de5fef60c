"""Dense complex matrix helpers and the shared matrix JSON format.

A Hamiltonian is represented as a plain ``numpy.ndarray`` of shape
``(n, n)`` and dtype ``complex128``.  The JSON wire format used across the
whole package is::

    { "dim": n, "entries": [ [ [re, im], ... ], ... ] }

with ``entries`` row-major.  Parsers reject non-square and non-finite data.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import FamilyFormatError, NonFiniteMatrixError

__all__ = [
    "as_matrix",
    "dagger",
    "frob",
    "matrix_from_json",
    "matrix_to_json",
    "parse_matrix",
    "dump_matrix",
]


def as_matrix(data) -> np.ndarray:
    """Coerce ``data`` to a finite square complex matrix.

    Raises ``ValueError`` for non-square input and
    ``NonFiniteMatrixError`` for NaN/Inf entries.
    """
    H = np.asarray(data, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    if H.shape[0] == 0:
        raise ValueError("empty matrix")
    if not np.all(np.isfinite(H.real)) or not np.all(np.isfinite(H.imag)):
        raise NonFiniteMatrixError("matrix contains non-finite entries")
    return H


def dagger(H: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return H.conj().T


def frob(H: np.ndarray) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(H))


def matrix_from_json(doc: dict) -> np.ndarray:
    """Build a matrix from a decoded JSON document."""
    if not isinstance(doc, dict) or "dim" not in doc or "entries" not in doc:
        raise FamilyFormatError("matrix document needs 'dim' and 'entries'")
    n = doc["dim"]
    if not isinstance(n, int) or n < 1:
        raise FamilyFormatError(f"'dim' must be a positive integer, got {n!r}")
    entries = doc["entries"]
    if len(entries) != n or any(len(row) != n for row in entries):
        raise FamilyFormatError(f"'entries' is not a {n}x{n} grid")
    try:
        H = np.array(
            [[complex(c[0], c[1]) for c in row] for row in entries], dtype=complex
        )
    except (TypeError, IndexError) as exc:
        raise FamilyFormatError(f"bad entry in matrix document: {exc}") from exc
    try:
        return as_matrix(H)
    except (ValueError, NonFiniteMatrixError) as exc:
        raise FamilyFormatError(str(exc)) from exc


def matrix_to_json(H: np.ndarray) -> dict:
    """Serialize a matrix to the shared JSON document form."""
    H = np.asarray(H, dtype=complex)
    return {
        "dim": int(H.shape[0]),
        "entries": [[[float(c.real), float(c.imag)] for c in row] for row in H],
    }


def parse_matrix(text: str | bytes) -> np.ndarray:
    """Parse a matrix from JSON text."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FamilyFormatError(f"invalid JSON: {exc}") from exc
    return matrix_from_json(doc)


def dump_matrix(H: np.ndarray) -> str:
    return json.dumps(matrix_to_json(H))
