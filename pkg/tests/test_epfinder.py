import numpy as np
import pytest

from nhsim.classes import SimilarityClass, generate_random
from nhsim.epfinder import (
    ScanConfig,
    certify_order,
    class_identity_check,
    reduced_constraints,
    scan,
    splitting_exponent,
)
from nhsim.errors import FamilyNotInClassError
from nhsim.families import MatrixFamily
from nhsim.spectral import is_normal

PH = SimilarityClass.PSEUDO_HERMITIAN
CH = SimilarityClass.CHIRAL
SS = SimilarityClass.SELF_SKEW_SIMILAR

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def dimer():
    return MatrixFamily(2, 1, ((SX, (0,)), (1j * SZ, (1,))), ("gamma",))


def trimer():
    E = np.eye(3)
    K = (np.outer(E[0], E[1]) + np.outer(E[1], E[0])
         + np.outer(E[1], E[2]) + np.outer(E[2], E[1])).astype(complex)
    D = 1j * (np.outer(E[0], E[0]) - np.outer(E[2], E[2]))
    return MatrixFamily(3, 2, ((K, (0, 1)), (D, (1, 0))), ("gamma", "k"))


def constant_family(M, nparams=1):
    M = np.asarray(M, dtype=complex)
    return MatrixFamily(M.shape[0], nparams, ((M, (0,) * nparams),))


def test_reduced_constraints_dimer():
    cs = reduced_constraints(dimer(), PH)
    assert cs.labels == ("Re det",)
    assert cs.codimension == 1
    assert "Im det" in cs.forced_zero
    # det(sx + i*gamma*sz) = gamma^2 - 1
    assert cs.evaluate([0.0])[0] == pytest.approx(-1.0)
    assert cs.evaluate([1.0])[0] == pytest.approx(0.0, abs=1e-12)


def test_reduced_constraints_trimer():
    cs = reduced_constraints(trimer(), PH)
    assert cs.labels == ("Re tr H^2", "Re det")
    assert cs.codimension == 2


def test_reduced_constraints_2x2_selfskew():
    f = MatrixFamily(2, 1, ((SX, (1,)),), ("a",))  # a*sx, spectrum {+/-a}
    cs = reduced_constraints(f, SS)
    assert cs.labels == ("Re det", "Im det")
    assert cs.codimension == 2


@pytest.mark.parametrize("n", range(2, 7))
def test_codimension_counting(n):
    from nhsim.epfinder import _build_system

    f = constant_family(np.zeros((n, n)))
    assert _build_system(f, PH).codimension == n - 1
    assert _build_system(f, CH).codimension == n - 1
    expected = n if n % 2 == 0 else n - 1
    assert _build_system(f, SS).codimension == expected


def test_identity_check_dimer_pseudo_hermitian_passes():
    rep = class_identity_check(dimer(), PH)
    assert rep.passed
    assert rep.worst_violation <= 1e-8


def test_identity_check_diagonal_chiral_fails():
    # H = lam*diag(1,2): spectrum {lam, 2lam} violates {e}={-e*}
    f = MatrixFamily(2, 1, ((np.diag([1.0, 2.0]).astype(complex), (1,)),), ("lam",))
    rep = class_identity_check(f, CH)
    assert not rep.passed
    assert "symmetry" in rep.worst_identity
    assert rep.worst_point is not None
    with pytest.raises(FamilyNotInClassError):
        reduced_constraints(f, CH)


def test_identity_check_scaled_sigma_z_chiral_passes():
    # lam*sz has spectrum {+/-lam}: real and mirror-symmetric, and sx is a
    # valid chiral witness for every lam
    f = MatrixFamily(2, 1, ((SZ, (1,)),), ("lam",))
    assert class_identity_check(f, CH).passed


def test_identity_check_forced_component_violation():
    # generic complex family is in no class; for PH the Im parts must fail
    rng = np.random.default_rng(0)
    M = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    rep = class_identity_check(constant_family(M), PH)
    assert not rep.passed


def test_identity_check_generated_in_class_families():
    # constant families built from in-class samples satisfy all identities
    for cls in SimilarityClass:
        H = generate_random(cls, 4, 21)
        rep = class_identity_check(constant_family(H), cls)
        assert rep.passed, (cls, rep.worst_identity, rep.worst_violation)


def test_scan_dimer_finds_both_ep2(recwarn):
    cands = [c for c in scan(dimer(), PH, ScanConfig(grid={"gamma": (-2, 2, 101)}))
             if c.converged]
    assert len(cands) == 2
    gammas = sorted(c.lam[0] for c in cands)
    assert gammas[0] == pytest.approx(-1.0, abs=1e-8)
    assert gammas[1] == pytest.approx(1.0, abs=1e-8)
    for c in cands:
        assert c.order == 2 and c.single_block
        assert c.constraint_residual <= 1e-8


def test_scan_trimer_finds_ep3():
    cfg = ScanConfig(grid={"gamma": (0, 3, 101)}, fixed={"k": 1.0})
    cands = [c for c in scan(trimer(), PH, cfg) if c.converged]
    assert len(cands) == 1
    assert cands[0].lam[0] == pytest.approx(np.sqrt(2), abs=1e-6)
    assert cands[0].order == 3 and cands[0].single_block


def test_scan_agrees_with_closed_form_roots():
    # independent oracle: roots of gamma^2-1 and 2k^2-gamma^2
    cands = [c for c in scan(dimer(), PH, ScanConfig(grid={"gamma": (-2, 2, 101)}))
             if c.converged]
    assert sorted(abs(abs(c.lam[0]) - 1.0) for c in cands) == pytest.approx(
        [0, 0], abs=1e-6
    )
    cfg = ScanConfig(grid={"gamma": (0, 3, 101)}, fixed={"k": 1.0})
    cands = [c for c in scan(trimer(), PH, cfg) if c.converged]
    assert abs(cands[0].lam[0] ** 2 - 2 * cands[0].lam[1] ** 2) <= 1e-6


def test_scan_hermitian_family_no_candidates():
    f = MatrixFamily(2, 1, ((SZ, (0,)), (SX, (1,))), ("lam",))
    cands = scan(f, PH, ScanConfig(grid={"lam": (-2, 2, 101)}))
    assert [c for c in cands if c.converged] == []
    for lam in np.linspace(-2, 2, 21):
        assert is_normal(f.evaluate([lam]))


def test_scan_anti_hermitian_family_no_candidates():
    f = MatrixFamily(2, 1, ((1j * SZ, (0,)), (1j * SX, (1,))), ("lam",))
    cands = scan(f, CH, ScanConfig(grid={"lam": (-2, 2, 101)}))
    assert [c for c in cands if c.converged] == []
    for lam in np.linspace(-2, 2, 21):
        assert is_normal(f.evaluate([lam]))


def test_scan_underdetermined_family_warns():
    with pytest.warns(UserWarning, match="codimension"):
        out = scan(dimer(), SS, ScanConfig(grid={"gamma": (-2, 2, 21)}))
    assert out == []


def test_scan_argument_validation():
    with pytest.raises(ValueError, match="neither scanned nor fixed"):
        scan(trimer(), PH, ScanConfig(grid={"gamma": (0, 3, 11)}))
    with pytest.raises(ValueError, match="unknown parameters"):
        scan(dimer(), PH,
             ScanConfig(grid={"gamma": (0, 1, 11)}, fixed={"nope": 1.0}))
    with pytest.raises(ValueError, match="bad grid"):
        scan(dimer(), PH, ScanConfig(grid={"gamma": (2, -2, 11)}))


def test_scan_threads_deterministic():
    cfg1 = ScanConfig(grid={"gamma": (-2, 2, 101)}, threads=1)
    cfg4 = ScanConfig(grid={"gamma": (-2, 2, 101)}, threads=4)
    a = [c.lam.tolist() for c in scan(dimer(), PH, cfg1)]
    b = [c.lam.tolist() for c in scan(dimer(), PH, cfg4)]
    assert a == b


def test_certify_order_examples():
    cert = certify_order(np.array([[1j, 1], [1, -1j]]))
    assert cert.order == 2 and cert.single_block
    cert = certify_order(trimer().evaluate([np.sqrt(2), 1.0]))
    assert cert.order == 3 and cert.single_block
    assert cert.geometric_multiplicity == 1
    cert = certify_order(np.zeros((2, 2)))
    assert cert.order == 1 and cert.geometric_multiplicity == 2
    assert not cert.single_block


def test_certify_order_json():
    doc = certify_order(np.array([[1j, 1], [1, -1j]])).to_json()
    assert doc["order"] == 2
    assert doc["single_block"] is True


def test_splitting_exponent_dimer():
    p = splitting_exponent(dimer(), [1.0], [1.0])
    assert 0.45 <= p <= 0.55


def test_splitting_exponent_crossing_is_linear():
    f = MatrixFamily(2, 1, ((SZ, (1,)),), ("lam",))
    p = splitting_exponent(f, [0.0], [1.0])
    assert 0.9 <= p <= 1.1


def test_splitting_exponent_degenerate_ray():
    # constant family: spread identically zero along any ray
    f = constant_family(np.array([[0, 1], [0, 0]]))
    with pytest.raises(RuntimeError, match="noise floor"):
        splitting_exponent(f, [0.0], [1.0])
    with pytest.raises(ValueError):
        splitting_exponent(dimer(), [1.0], [0.0])


def test_splitting_exponent_generic_ep3_third_root():
    # EP3 perturbed by a direction that breaks the family structure: add a
    # constant-matrix knob and verify the 1/3 branch-point scaling
    E = np.eye(3)
    K = (np.outer(E[0], E[1]) + np.outer(E[1], E[0])
         + np.outer(E[1], E[2]) + np.outer(E[2], E[1])).astype(complex)
    D = 1j * (np.outer(E[0], E[0]) - np.outer(E[2], E[2]))
    rng = np.random.default_rng(3)
    P = (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    f = MatrixFamily(
        3, 2, ((K, (0, 0)), (D, (1, 0)), (P, (0, 1))), ("gamma", "mu")
    )
    p = splitting_exponent(f, [np.sqrt(2), 0.0], [0.0, 1.0])
    assert 0.28 <= p <= 0.38
