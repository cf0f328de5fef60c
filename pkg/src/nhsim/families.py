"""Polynomial matrix families over real parameters.

A family is ``H(lam) = sum_t M_t * prod_i lam_i**e_{t,i}`` with complex
coefficient matrices ``M_t`` and nonnegative integer exponents.  The JSON
schema is::

    { "dim": n, "params": d,
      "terms": [ { "matrix": <matrix JSON>, "exponents": [e1..ed] }, ... ] }

An optional ``"param_names"`` list labels the parameters (used by the CLI
grid syntax); it defaults to ``p1..pd``.  Families are immutable after
parsing.  Transcendental parameter dependence is deliberately out of
scope: every example in the theory this feeds is polynomial, and
polynomial terms keep the finite-difference Jacobians well-behaved.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import FamilyFormatError, NonFiniteMatrixError
from .matrices import matrix_from_json, matrix_to_json

__all__ = [
    "MatrixFamily",
    "parse_family",
    "family_from_json",
    "family_to_json",
    "constraint_jacobian",
]

DEFAULT_FD_STEP = 1e-6


@dataclass(frozen=True)
class MatrixFamily:
    """Polynomial family of square complex matrices."""

    dim: int
    num_params: int
    terms: tuple[tuple[np.ndarray, tuple[int, ...]], ...]
    param_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.terms:
            raise FamilyFormatError("family needs at least one term")
        names = self.param_names or tuple(
            f"p{i + 1}" for i in range(self.num_params)
        )
        if len(names) != self.num_params:
            raise FamilyFormatError(
                f"{len(names)} parameter names for {self.num_params} parameters"
            )
        object.__setattr__(self, "param_names", names)

    def check_point(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float).ravel()
        if lam.size != self.num_params:
            raise ValueError(
                f"family has {self.num_params} parameters, point has {lam.size}"
            )
        if not np.all(np.isfinite(lam)):
            raise NonFiniteMatrixError("non-finite parameter point")
        return lam

    def evaluate(self, lam) -> np.ndarray:
        """Evaluate ``H(lam)`` by direct polynomial summation."""
        lam = self.check_point(lam)
        H = np.zeros((self.dim, self.dim), dtype=complex)
        for M, exps in self.terms:
            coeff = 1.0
            for x, e in zip(lam, exps):
                if e:
                    coeff *= x**e
            H += coeff * M
        return H

    __call__ = evaluate

    def to_json(self) -> dict:
        return family_to_json(self)


def family_from_json(doc: dict) -> MatrixFamily:
    """Validate and build a family from a decoded JSON document."""
    if not isinstance(doc, dict):
        raise FamilyFormatError("family document must be a JSON object")
    for key in ("dim", "params", "terms"):
        if key not in doc:
            raise FamilyFormatError(f"family document missing '{key}'")
    n, d = doc["dim"], doc["params"]
    if not isinstance(n, int) or n < 1:
        raise FamilyFormatError(f"'dim' must be a positive integer, got {n!r}")
    if not isinstance(d, int) or d < 0:
        raise FamilyFormatError(f"'params' must be a nonnegative integer, got {d!r}")
    raw_terms = doc["terms"]
    if not isinstance(raw_terms, list) or not raw_terms:
        raise FamilyFormatError("'terms' must be a nonempty list")
    terms = []
    for t, term in enumerate(raw_terms):
        where = f"terms[{t}]"
        if not isinstance(term, dict) or "matrix" not in term or "exponents" not in term:
            raise FamilyFormatError(f"{where} needs 'matrix' and 'exponents'")
        try:
            M = matrix_from_json(term["matrix"])
        except FamilyFormatError as exc:
            raise FamilyFormatError(f"{where}.matrix: {exc}") from exc
        if M.shape[0] != n:
            raise FamilyFormatError(
                f"{where}.matrix is {M.shape[0]}x{M.shape[0]}, family dim is {n}"
            )
        exps = term["exponents"]
        if not isinstance(exps, list) or len(exps) != d:
            raise FamilyFormatError(
                f"{where}.exponents must list {d} entries, got {exps!r}"
            )
        for i, e in enumerate(exps):
            if not isinstance(e, int) or e < 0:
                raise FamilyFormatError(
                    f"{where}.exponents[{i}] must be a nonnegative integer, got {e!r}"
                )
        terms.append((M, tuple(exps)))
    names = doc.get("param_names")
    if names is not None:
        if (
            not isinstance(names, list)
            or len(names) != d
            or not all(isinstance(s, str) and s for s in names)
        ):
            raise FamilyFormatError(f"'param_names' must list {d} nonempty strings")
        names = tuple(names)
    else:
        names = ()
    return MatrixFamily(dim=n, num_params=d, terms=tuple(terms), param_names=names)


def parse_family(text: str | bytes) -> MatrixFamily:
    """Parse a family from JSON text."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FamilyFormatError(f"invalid JSON: {exc}") from exc
    return family_from_json(doc)


def family_to_json(f: MatrixFamily) -> dict:
    return {
        "dim": f.dim,
        "params": f.num_params,
        "terms": [
            {"matrix": matrix_to_json(M), "exponents": list(exps)}
            for M, exps in f.terms
        ],
        "param_names": list(f.param_names),
    }


def constraint_jacobian(g, lam0, h: float = DEFAULT_FD_STEP) -> np.ndarray:
    """Central-difference Jacobian of a real vector function of ``lam``.

    Per-coordinate step ``h_i = h * max(1, |lam_i|)``; O(h^2) accurate on
    smooth functions.  Raises ``NonFiniteMatrixError`` when ``g`` produces
    non-finite values near ``lam0``.
    """
    lam0 = np.asarray(lam0, dtype=float).ravel()
    g0 = np.atleast_1d(np.asarray(g(lam0), dtype=float))
    cols = []
    for i in range(lam0.size):
        hi = h * max(1.0, abs(lam0[i]))
        lp, lm = lam0.copy(), lam0.copy()
        lp[i] += hi
        lm[i] -= hi
        gp = np.atleast_1d(np.asarray(g(lp), dtype=float))
        gm = np.atleast_1d(np.asarray(g(lm), dtype=float))
        cols.append((gp - gm) / (2 * hi))
    J = np.column_stack(cols) if cols else np.zeros((g0.size, 0))
    if not np.all(np.isfinite(J)):
        raise NonFiniteMatrixError("non-finite constraint values near the point")
    return J
