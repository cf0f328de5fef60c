"""The three generalized similarity classes and their Hermitian witnesses.

A matrix belongs to a class when an invertible Hermitian transform exists
satisfying the defining equation:

========================  =============================  ==================
class                     defining equation              spectral constraint
========================  =============================  ==================
``PseudoHermitian``       ``H = eta H^+ eta^-1``         {eps} = {eps*}
``Chiral``                ``H = -Gamma H^+ Gamma^-1``    {eps} = {-eps*}
``SelfSkewSimilar``       ``H = -S H S^-1``              {eps} = {-eps}
========================  =============================  ==================

The pseudo-Hermitian and chiral witnesses are built constructively from the
Jordan decomposition: blocks are grouped into self-symmetric clusters and
mapped pairs, each group receives a small Hermitian exchange kernel ``G_j``,
and the witness is ``Q G Q^+``.  The self-skew witness cannot be produced by
that recipe (``Q G Q^+`` conjugates ``H^+``, not ``H``); it is instead the
best invertible element of the Hermitian solution space of the linear
equation ``HS + SH = 0``, which is an exact decision procedure.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ClassMismatchError
from .matrices import as_matrix, dagger, frob
from .spectral import (
    DEFAULT_TOLERANCES,
    JordanStructure,
    ToleranceConfig,
    eigenvalues,
    is_normal,
    jordan_decompose,
    multiset_symmetry_match,
)

__all__ = [
    "SimilarityClass",
    "SimilarityWitness",
    "SpecialCaseReport",
    "ClassificationResult",
    "classify",
    "construct_eta",
    "construct_gamma",
    "construct_skew_witness",
    "construct_witness",
    "witness_residual",
    "factor",
    "generate_random",
    "detect_special_cases",
]


class SimilarityClass(enum.Enum):
    PSEUDO_HERMITIAN = "PseudoHermitian"
    CHIRAL = "Chiral"
    SELF_SKEW_SIMILAR = "SelfSkewSimilar"

    @classmethod
    def from_tag(cls, tag: str) -> "SimilarityClass":
        aliases = {
            "pseudohermitian": cls.PSEUDO_HERMITIAN,
            "pseudo-hermitian": cls.PSEUDO_HERMITIAN,
            "chiral": cls.CHIRAL,
            "selfskewsimilar": cls.SELF_SKEW_SIMILAR,
            "self-skew-similar": cls.SELF_SKEW_SIMILAR,
            "self-skew": cls.SELF_SKEW_SIMILAR,
        }
        key = tag.strip().lower()
        if key not in aliases:
            raise ValueError(f"unknown similarity class {tag!r}")
        return aliases[key]


#: spectral-symmetry map associated with each class
CLASS_MAP = {
    SimilarityClass.PSEUDO_HERMITIAN: "conj",
    SimilarityClass.CHIRAL: "negconj",
    SimilarityClass.SELF_SKEW_SIMILAR: "neg",
}


@dataclass
class SimilarityWitness:
    similarity_class: SimilarityClass
    transform: np.ndarray
    residual: float
    hermiticity_defect: float
    min_singular_value: float

    def to_json(self) -> dict:
        from .matrices import matrix_to_json

        return {
            "class": self.similarity_class.value,
            "transform": matrix_to_json(self.transform),
            "residual": self.residual,
        }


@dataclass
class SpecialCaseReport:
    """Defining-residual flags for the trivial generator-is-identity cases."""

    flags: set[str] = field(default_factory=set)

    def __contains__(self, flag: str) -> bool:
        return flag in self.flags


@dataclass
class ClassificationResult:
    """Witness-confirmed classes plus diagnostics.

    ``spectral_only`` lists classes whose spectral-symmetry necessary
    condition holds but for which no valid witness could be built; the
    distinction is diagnostic, not hidden.
    """

    confirmed: set[SimilarityClass] = field(default_factory=set)
    spectral_only: set[SimilarityClass] = field(default_factory=set)
    witnesses: dict[SimilarityClass, SimilarityWitness] = field(default_factory=dict)

    @property
    def candidates(self) -> set[SimilarityClass]:
        return self.confirmed | self.spectral_only


def witness_residual(H: np.ndarray, cls: SimilarityClass, S: np.ndarray) -> float:
    """Relative residual of the class-defining equation for transform ``S``."""
    H = as_matrix(H)
    S = as_matrix(S)
    nH = frob(H)
    if cls is SimilarityClass.SELF_SKEW_SIMILAR:
        denom = nH * frob(S)
        return frob(H @ S + S @ H) / denom if denom > 0 else 0.0
    if nH == 0:
        return 0.0
    conj = np.linalg.solve(S.T, (S @ dagger(H)).T).T  # S H^+ S^-1
    if cls is SimilarityClass.PSEUDO_HERMITIAN:
        return frob(H - conj) / nH
    return frob(H + conj) / nH


def _witness_from_transform(H, cls, S) -> SimilarityWitness:
    sv = np.linalg.svd(S, compute_uv=False)
    return SimilarityWitness(
        similarity_class=cls,
        transform=S,
        residual=witness_residual(H, cls, S),
        hermiticity_defect=frob(S - dagger(S)) / max(frob(S), 1e-300),
        min_singular_value=float(sv[-1]),
    )


# ---------------------------------------------------------------------------
# exchange kernels for the Jordan-block construction


def _exchange(m: int) -> np.ndarray:
    return np.fliplr(np.eye(m)).astype(complex)


def _alt_exchange(m: int) -> np.ndarray:
    """Anti-diagonal with alternating signs; solves ``N B = -B N^T``."""
    B = np.zeros((m, m), dtype=complex)
    for j in range(m):
        B[j, m - 1 - j] = (-1) ** j
    return B


def _cluster_groups(jordan: JordanStructure):
    """Blocks and column offsets grouped per eigenvalue cluster."""
    groups: dict[int, list[int]] = {}
    offs = jordan.offsets
    for b, ci in enumerate(jordan.cluster_index):
        groups.setdefault(ci, []).append(b)
    out = []
    for ci in sorted(groups):
        idx = groups[ci]
        eps = jordan.blocks[idx[0]].eigenvalue
        sizes = [jordan.blocks[b].size for b in idx]
        offsets = [offs[b] for b in idx]
        out.append((eps, sizes, offsets))
    return out


def _pair_clusters(groups, mapped, tol):
    """Involutive pairing of clusters with their images under the class map.

    Returns ``(self_paired, pairs)`` as lists of group indices; raises
    ``ClassMismatchError`` when some cluster has no partner or the Jordan
    block sizes of partners disagree.
    """
    k = len(groups)
    partner = [-1] * k
    for i in range(k):
        dists = [abs(groups[i][0] - mapped[j]) for j in range(k)]
        j = int(np.argmin(dists))
        if dists[j] > tol:
            raise ClassMismatchError(
                f"cluster at {groups[i][0]:.6g} has no spectral partner"
            )
        partner[i] = j
    self_paired, pairs = [], []
    for i in range(k):
        j = partner[i]
        if partner[j] != i:
            raise ClassMismatchError("cluster pairing is not involutive")
        if j == i:
            self_paired.append(i)
        elif i < j:
            if sorted(groups[i][1]) != sorted(groups[j][1]):
                raise ClassMismatchError(
                    "Jordan block sizes of paired clusters disagree"
                )
            pairs.append((i, j))
    return self_paired, pairs


def _build_witness_from_jordan(H, cls, cfg, jordan):
    """Shared eta/Gamma construction: ``witness = Q G Q^+``.

    For the pseudo-Hermitian case every kernel is the plain exchange
    matrix; for the chiral case self-symmetric (purely imaginary) clusters
    get the alternating-sign exchange (times ``i`` for even block sizes,
    which Hermiticity forces) and mapped pairs get the alternating-sign
    off-diagonal coupling.
    """
    n = H.shape[0]
    if jordan is None:
        jordan = jordan_decompose(H, cfg)
    groups = _cluster_groups(jordan)
    f = {"conj": np.conj, "negconj": lambda z: -np.conj(z)}[CLASS_MAP[cls]]
    mapped = [f(g[0]) for g in groups]
    scale = max(frob(H), 1.0)
    self_paired, pairs = _pair_clusters(groups, mapped, 10 * cfg.cluster_tol * scale)

    chiral = cls is SimilarityClass.CHIRAL
    G = np.zeros((n, n), dtype=complex)
    for i in self_paired:
        _, sizes, offsets = groups[i]
        for m, p in zip(sizes, offsets):
            if chiral:
                K = _alt_exchange(m)
                if m % 2 == 0:
                    K = 1j * K
            else:
                K = _exchange(m)
            G[p : p + m, p : p + m] = K
    for i, j in pairs:
        _, sizes_i, offs_i = groups[i]
        _, sizes_j, offs_j = groups[j]
        # blocks are stored sorted by decreasing size within each cluster
        for m, pi, pj in zip(sizes_i, offs_i, offs_j):
            B = _alt_exchange(m) if chiral else _exchange(m)
            G[pi : pi + m, pj : pj + m] = B
            G[pj : pj + m, pi : pi + m] = dagger(B)

    Q = jordan.Q
    S = Q @ G @ dagger(Q)
    S = (S + dagger(S)) / 2  # discard rounding-level Hermiticity defect
    return _witness_from_transform(H, cls, S)


def _check_spectral_precondition(H, cls, cfg):
    spec = eigenvalues(H)
    tol = max(cfg.cluster_tol * frob(H), 10 * cfg.rank_tol)
    if multiset_symmetry_match(spec, CLASS_MAP[cls], tol) is None:
        raise ClassMismatchError(
            f"spectrum violates the {cls.value} symmetry constraint"
        )


def construct_eta(H, cfg: ToleranceConfig = DEFAULT_TOLERANCES, jordan=None):
    """Hermitian invertible ``eta`` with ``H = eta H^+ eta^-1``.

    Requires the spectrum to be closed under conjugation; real-eigenvalue
    Jordan blocks receive the exchange kernel, conjugate pairs the two-block
    exchange coupling.
    """
    H = as_matrix(H)
    if H.shape[0] == 1:
        _check_spectral_precondition(H, SimilarityClass.PSEUDO_HERMITIAN, cfg)
        return _witness_from_transform(
            H, SimilarityClass.PSEUDO_HERMITIAN, np.eye(1, dtype=complex)
        )
    _check_spectral_precondition(H, SimilarityClass.PSEUDO_HERMITIAN, cfg)
    return _build_witness_from_jordan(H, SimilarityClass.PSEUDO_HERMITIAN, cfg, jordan)


def construct_gamma(H, cfg: ToleranceConfig = DEFAULT_TOLERANCES, jordan=None):
    """Hermitian invertible ``Gamma`` with ``H = -Gamma H^+ Gamma^-1``.

    Requires the spectrum to be mirror-symmetric about the imaginary axis.
    """
    H = as_matrix(H)
    if H.shape[0] == 1:
        _check_spectral_precondition(H, SimilarityClass.CHIRAL, cfg)
        return _witness_from_transform(
            H, SimilarityClass.CHIRAL, np.eye(1, dtype=complex)
        )
    _check_spectral_precondition(H, SimilarityClass.CHIRAL, cfg)
    return _build_witness_from_jordan(H, SimilarityClass.CHIRAL, cfg, jordan)


def _hermitian_basis(n: int):
    basis = []
    for i in range(n):
        E = np.zeros((n, n), dtype=complex)
        E[i, i] = 1.0
        basis.append(E)
    for i in range(n):
        for j in range(i + 1, n):
            E = np.zeros((n, n), dtype=complex)
            E[i, j] = E[j, i] = 1.0
            basis.append(E)
            E = np.zeros((n, n), dtype=complex)
            E[i, j] = 1j
            E[j, i] = -1j
            basis.append(E)
    return basis


def construct_skew_witness(H, cfg: ToleranceConfig = DEFAULT_TOLERANCES, jordan=None):
    """Hermitian invertible ``S`` with ``{H, S} = 0``.

    The anticommutator equation is linear in ``S``; restricting to Hermitian
    ``S`` gives a real linear system whose nullspace is computed exactly via
    SVD.  The returned witness is the best-conditioned element found in that
    solution space (deterministic random combinations).  Raises
    ``ClassMismatchError`` when the space is empty or contains no invertible
    element: the spectral constraint {eps} = {-eps} is necessary but not
    sufficient for a *Hermitian* witness.
    """
    H = as_matrix(H)
    n = H.shape[0]
    cls = SimilarityClass.SELF_SKEW_SIMILAR
    scale = frob(H)
    if scale == 0.0:
        return _witness_from_transform(H, cls, np.eye(n, dtype=complex))
    _check_spectral_precondition(H, cls, cfg)

    basis = _hermitian_basis(n)
    cols = []
    for B in basis:
        M = H @ B + B @ H
        cols.append(np.concatenate([M.real.ravel(), M.imag.ravel()]))
    A = np.array(cols).T
    _, s, Vt = np.linalg.svd(A)
    cut = cfg.residual_tol * (s[0] if s.size else 1.0)
    null = Vt[int(np.sum(s > cut)) :]
    if null.shape[0] == 0:
        raise ClassMismatchError("no Hermitian anticommuting transform exists")
    sols = np.tensordot(null, np.array(basis), axes=(1, 0))  # (w, n, n)

    rng = np.random.default_rng(0)  # deterministic search, part of the contract
    best, best_ratio = None, -1.0
    candidates = list(sols)
    for _ in range(32):
        c = rng.standard_normal(sols.shape[0])
        candidates.append(np.tensordot(c, sols, axes=(0, 0)))
    for S in candidates:
        sv = np.linalg.svd(S, compute_uv=False)
        if sv[0] == 0:
            continue
        ratio = sv[-1] / sv[0]
        if ratio > best_ratio:
            best_ratio, best = ratio, S
    if best is None or best_ratio <= cfg.rank_tol:
        raise ClassMismatchError(
            "Hermitian anticommutant contains no invertible element"
        )
    best = (best + dagger(best)) / 2
    return _witness_from_transform(H, cls, best)


_CONSTRUCTORS = {
    SimilarityClass.PSEUDO_HERMITIAN: construct_eta,
    SimilarityClass.CHIRAL: construct_gamma,
    SimilarityClass.SELF_SKEW_SIMILAR: construct_skew_witness,
}


def construct_witness(H, cls: SimilarityClass, cfg=DEFAULT_TOLERANCES, jordan=None):
    return _CONSTRUCTORS[cls](H, cfg, jordan)


def _witness_ok(w: SimilarityWitness, cfg: ToleranceConfig) -> bool:
    sv_max = np.linalg.norm(w.transform, 2)
    return (
        w.residual <= cfg.residual_tol
        and w.hermiticity_defect <= cfg.residual_tol
        and w.min_singular_value > cfg.rank_tol * max(sv_max, 1e-300)
    )


def classify(H, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> ClassificationResult:
    """Classes whose spectral condition holds, split by witness success.

    A class lands in ``confirmed`` when the spectral-symmetry multiset test
    passes *and* the witness construction succeeds within tolerance;
    otherwise it is reported in ``spectral_only``.
    """
    H = as_matrix(H)
    result = ClassificationResult()
    spec = eigenvalues(H)
    tol = max(cfg.cluster_tol * frob(H), 10 * cfg.rank_tol)
    jordan = None
    for cls in SimilarityClass:
        if multiset_symmetry_match(spec, CLASS_MAP[cls], tol) is None:
            continue
        if (
            jordan is None
            and H.shape[0] > 1
            and cls is not SimilarityClass.SELF_SKEW_SIMILAR
        ):
            jordan = jordan_decompose(H, cfg)
        try:
            w = construct_witness(H, cls, cfg, jordan)
        except ClassMismatchError:
            result.spectral_only.add(cls)
            continue
        if _witness_ok(w, cfg):
            result.confirmed.add(cls)
            result.witnesses[cls] = w
        else:
            result.spectral_only.add(cls)
    return result


def factor(H, cls: SimilarityClass, cfg: ToleranceConfig = DEFAULT_TOLERANCES):
    """Hermitian factorization certificates.

    PseudoHermitian: ``(eta, A)`` with ``H = eta A`` and ``A`` Hermitian.
    Chiral: ``(Gamma, C)`` with ``H = i Gamma C`` and ``C`` Hermitian.
    SelfSkewSimilar: ``(S, H)`` -- the anticommuting witness; no
    factorization is claimed for this class.
    """
    H = as_matrix(H)
    w = construct_witness(H, cls, cfg)
    if not _witness_ok(w, cfg):
        raise ClassMismatchError(
            f"witness for {cls.value} exceeds tolerance (residual {w.residual:.3g})"
        )
    T = w.transform
    if cls is SimilarityClass.SELF_SKEW_SIMILAR:
        return T, H
    if cls is SimilarityClass.PSEUDO_HERMITIAN:
        A = np.linalg.solve(T, H)
    else:
        A = -1j * np.linalg.solve(T, H)
    defect = frob(A - dagger(A)) / max(frob(A), 1e-300)
    if defect > 10 * cfg.residual_tol * max(np.linalg.cond(T), 1.0):
        raise ClassMismatchError(
            f"factor is not Hermitian within tolerance (defect {defect:.3g})"
        )
    A = (A + dagger(A)) / 2
    return T, A


# ---------------------------------------------------------------------------
# sample generation


def _random_complex(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def _random_hermitian(rng, n):
    A = _random_complex(rng, n)
    return (A + dagger(A)) / 2


def _random_hermitian_invertible(rng, n, floor=1e-2):
    """Gaussian Hermitian, identity-shifted until the smallest singular value
    exceeds ``floor`` times the spectral norm."""
    M = _random_hermitian(rng, n)
    w, V = np.linalg.eigh(M)
    while np.min(np.abs(w)) < floor * np.max(np.abs(w)):
        w = w + 2 * floor * np.max(np.abs(w))
    return (V * w) @ dagger(V)


def generate_random(
    cls: SimilarityClass,
    n: int,
    seed: int,
    non_normal: bool = False,
    max_attempts: int = 100,
) -> np.ndarray:
    """Deterministic in-class sample (PCG64 stream seeded with ``seed``).

    PseudoHermitian samples are ``eta A`` and chiral samples ``i Gamma C``
    with ``eta``/``Gamma`` random Hermitian invertible and ``A``/``C``
    random Hermitian.  Self-skew samples are unitary conjugations of a
    matrix with vanishing diagonal blocks in the basis where
    ``S = diag(I_p, -I_q)``; unitary (rather than arbitrary invertible)
    conjugation is required to keep a *Hermitian* witness in existence.
    With ``non_normal=True``, samples whose commutator ``[H, H^+]`` falls
    below ``1e-6 |H|_F^2`` are rejected and redrawn.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        if cls is SimilarityClass.PSEUDO_HERMITIAN:
            if n == 1:
                H = np.array([[rng.standard_normal()]], dtype=complex)
            else:
                H = _random_hermitian_invertible(rng, n) @ _random_hermitian(rng, n)
        elif cls is SimilarityClass.CHIRAL:
            if n == 1:
                H = np.array([[1j * rng.standard_normal()]], dtype=complex)
            else:
                H = 1j * (
                    _random_hermitian_invertible(rng, n) @ _random_hermitian(rng, n)
                )
        else:
            if n == 1:
                return np.zeros((1, 1), dtype=complex)
            p = n // 2
            M = np.zeros((n, n), dtype=complex)
            M[:p, p:] = _random_complex(rng, n)[: p, : n - p]
            M[p:, :p] = _random_complex(rng, n)[: n - p, : p]
            U, _ = np.linalg.qr(_random_complex(rng, n))
            H = U @ M @ dagger(U)
        if not non_normal or not is_normal(H, 1e-6):
            return H
    raise RuntimeError(
        f"failed to draw a non-normal {cls.value} sample in {max_attempts} attempts"
    )


def detect_special_cases(
    H, cfg: ToleranceConfig = DEFAULT_TOLERANCES
) -> SpecialCaseReport:
    """Flags for the generator-is-identity special cases, each decided by a
    defining residual relative to ``|H|_F``."""
    H = as_matrix(H)
    scale = max(frob(H), 1e-300)
    tol = cfg.residual_tol
    flags = set()
    if frob(H - dagger(H)) / scale <= tol:
        flags.add("Hermitian")
    if frob(H - H.conj()) / scale <= tol:
        flags.add("Real")
    if frob(H + dagger(H)) / scale <= tol:
        flags.add("AntiHermitian")
    if frob(H + H.conj()) / scale <= tol:
        flags.add("Imaginary")
    if frob(H + H.T) / scale <= tol:
        flags.add("AntiSymmetric")
    if is_normal(H, tol):
        flags.add("Normal")
    return SpecialCaseReport(flags=flags)
