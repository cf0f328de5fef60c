"""Walkthrough: exceptional-point search with class-reduced constraints.

An EPn needs all n eigenvalues and eigenvectors to coalesce.  Generically
that costs 2(n-1) real conditions, but each similarity class forces part of
the det/trace constraint system to vanish identically, cutting the count to
n-1 (or n for even-dimensional self-skew-similar families).

Run with:  python demos/ep_scan.py
"""

import numpy as np

from nhsim import (
    MatrixFamily,
    ScanConfig,
    SimilarityClass,
    certify_order,
    reduced_constraints,
    scan,
    splitting_exponent,
)

np.set_printoptions(precision=4, suppress=True, linewidth=100)
PH = SimilarityClass.PSEUDO_HERMITIAN


def banner(text):
    print(f"\n=== {text} ===")


sx = np.array([[0, 1], [1, 0]], dtype=complex)
sz = np.diag([1.0, -1.0]).astype(complex)

banner("dimer H(gamma) = sigma_x + i gamma sigma_z")
dimer = MatrixFamily(2, 1, ((sx, (0,)), (1j * sz, (1,))), ("gamma",))
cs = reduced_constraints(dimer, PH)
print("active constraints:", cs.labels, " (codimension", cs.codimension, ")")
print("forced to zero by the class:", cs.forced_zero)
cands = scan(dimer, PH, ScanConfig(grid={"gamma": (-2, 2, 101)}))
for c in cands:
    print(f"  gamma = {c.lam[0]:+.12f}  order {c.order}  "
          f"residual {c.constraint_residual:.1e}")
p = splitting_exponent(dimer, [1.0], [1.0])
print(f"splitting exponent at gamma=1: {p:.4f}  (EP2 square-root branch)")

banner("gain/loss trimer H(gamma,k), scanning gamma at k=1")
E = np.eye(3)
K = (np.outer(E[0], E[1]) + np.outer(E[1], E[0])
     + np.outer(E[1], E[2]) + np.outer(E[2], E[1])).astype(complex)
D = 1j * (np.outer(E[0], E[0]) - np.outer(E[2], E[2]))
trimer = MatrixFamily(3, 2, ((K, (0, 1)), (D, (1, 0))), ("gamma", "k"))
cs = reduced_constraints(trimer, PH)
print("active constraints:", cs.labels)
cfg = ScanConfig(grid={"gamma": (0, 3, 101)}, fixed={"k": 1.0})
for c in scan(trimer, PH, cfg):
    print(f"  gamma = {c.lam[0]:.12f}  order {c.order}  "
          f"single block: {c.single_block}  (sqrt(2) = {np.sqrt(2):.12f})")

banner("certifying the EP3 and probing the branch point")
cert = certify_order(trimer.evaluate([np.sqrt(2), 1.0]))
print("order", cert.order, "- geometric multiplicity",
      cert.geometric_multiplicity, "- single block:", cert.single_block)
p_in = splitting_exponent(trimer, [np.sqrt(2), 1.0], [1.0, 0.0])
print(f"in-family exponent: {p_in:.4f}  (det == 0 across the family keeps one "
      "eigenvalue pinned at zero, so the pair splits as a square root)")
rng = np.random.default_rng(3)
P = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
extended = MatrixFamily(3, 2, ((K, (0, 0)), (D, (1, 0)), (P, (0, 1))),
                        ("gamma", "mu"))
p_out = splitting_exponent(extended, [np.sqrt(2), 0.0], [0.0, 1.0])
print(f"generic (out-of-family) exponent: {p_out:.4f}  (cube-root: a true EP3)")

banner("control: a Hermitian family has no EPs at all")
herm = MatrixFamily(2, 1, ((sz, (0,)), (sx, (1,))), ("lam",))
cands = [c for c in scan(herm, PH, ScanConfig(grid={"lam": (-2, 2, 101)}))
         if c.converged]
print("certified candidates for sigma_z + lam sigma_x:", cands or "none")
