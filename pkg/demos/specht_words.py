"""Walkthrough: word traces, unitary similarity and symmetry generators.

Similarity classes enclose familiar symmetries (PT, CP, sublattice, ...):
every symmetric matrix is in the class, but not the other way around.  For
2x2 matrices class membership still forces the symmetry; from 3x3 on it
does not, and word traces certify the difference.

Run with:  python demos/specht_words.py
"""

import numpy as np

from nhsim import (
    SimilarityClass,
    check_similarity_implies_symmetry_2x2,
    generate_random,
    n3_counterexample,
    trace_profile,
    unitary_similarity_test,
)

np.set_printoptions(precision=4, suppress=True, linewidth=100)


def banner(text):
    print(f"\n=== {text} ===")


banner("unitary similarity is decided by finitely many word traces")
sx = np.array([[0, 1], [1, 0]], dtype=complex)
sz = np.diag([1.0, -1.0]).astype(complex)
print("sigma_x ~ sigma_z:", unitary_similarity_test(sx, sz))
print("[[0,2],[0,0]] ~ [[0,1],[0,0]]:",
      unitary_similarity_test([[0, 2], [0, 0]], [[0, 1], [0, 0]]),
      " (tr XXdag differs: 4 vs 1)")

banner("the profile of a 3x3 matrix (seven canonical words)")
H = generate_random(SimilarityClass.PSEUDO_HERMITIAN, 3, seed=1, non_normal=True)
for w, t in trace_profile(H):
    print(f"  tr {str(w):14s} = {t: .4f}")

banner("n=2: pseudo-Hermiticity forces both enclosed symmetries")
H2 = generate_random(SimilarityClass.PSEUDO_HERMITIAN, 2, seed=5, non_normal=True)
for name, r in check_similarity_implies_symmetry_2x2(
    H2, SimilarityClass.PSEUDO_HERMITIAN
).items():
    print(f"  {name:28s} similarity residual {r.similarity_residual:.1e}, "
          f"property defect {r.property_defect:.1e}")

banner("n=2 self-skew: sublattice generator exists, pseudo-chiral does not")
H2 = generate_random(SimilarityClass.SELF_SKEW_SIMILAR, 2, seed=5, non_normal=True)
for name, r in check_similarity_implies_symmetry_2x2(
    H2, SimilarityClass.SELF_SKEW_SIMILAR
).items():
    verdict = "found" if max(r.similarity_residual, r.property_defect) < 1e-8 \
        else "NOT achievable"
    print(f"  {name:28s} {verdict}  (defect "
          f"{max(r.similarity_residual, r.property_defect):.1e})")

banner("n=3: class membership no longer implies symmetry")
for cls in SimilarityClass:
    ev = n3_counterexample(cls, seed=0)
    print(f"  {cls.value:18s} word {str(ev.word):14s} rules out "
          f"{ev.symmetry:26s} |delta tr| = {ev.mismatch:.3g}")
