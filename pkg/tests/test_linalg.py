import numpy as np
import pytest

from levyme import linalg
from levyme.errors import DomainError, ImaginaryResidue, SingularMatrix


def test_lu_solve_matches_numpy(rng):
    A = rng.normal(size=(6, 6)) + 6 * np.eye(6)
    B = rng.normal(size=(6, 3))
    np.testing.assert_allclose(linalg.lu_solve(A, B), np.linalg.solve(A, B), rtol=1e-12)
    b = rng.normal(size=6)
    np.testing.assert_allclose(linalg.lu_solve(A, b), np.linalg.solve(A, b), rtol=1e-12)


def test_lu_solve_complex():
    A = np.array([[1 + 1j, 2], [0.5, -1j]])
    b = np.array([1.0, 2j])
    np.testing.assert_allclose(A @ linalg.lu_solve(A, b), b, atol=1e-14)


def test_lu_solve_singular():
    with pytest.raises(SingularMatrix):
        linalg.lu_solve(np.array([[1.0, 2.0], [2.0, 4.0]]), np.ones(2))


def test_as_cmatrix_rejects_bad_input():
    with pytest.raises(DomainError):
        linalg.as_cmatrix(np.ones((2, 3)))
    with pytest.raises(DomainError):
        linalg.as_cmatrix([[np.nan]])


def test_realify():
    np.testing.assert_array_equal(linalg.realify(np.array([1 + 1e-14j])), [1.0])
    with pytest.raises(ImaginaryResidue):
        linalg.realify(np.array([1 + 1e-3j]))


def test_char_poly_and_adjugate(rng):
    A = rng.normal(size=(4, 4))
    coeffs, adj = linalg.char_poly(A, adjugate=True)
    np.testing.assert_allclose(coeffs, np.poly(A), atol=1e-12)
    z = 0.3 + 0.7j
    lhs = sum(B * z ** (4 - k) for k, B in enumerate(adj, start=1))
    np.testing.assert_allclose(lhs @ (z * np.eye(4) - A), np.polyval(coeffs, z) * np.eye(4), atol=1e-11)


def test_spectrum_cos2(cos2):
    eig = np.sort_complex(linalg.spectrum(cos2.T).eigenvalues)
    np.testing.assert_allclose(eig, [-1 - 4j, -1, -1 + 4j], atol=1e-12)


def test_roots_flags_multiple_root():
    sp = linalg.roots([1.0, -2.0, 1.0], require_simple=False)
    assert not sp.simple
    np.testing.assert_allclose(sp.eigenvalues, [1.0, 1.0], atol=1e-6)


def test_spectral_calculus_exponential(rng):
    A = rng.normal(size=(5, 5))
    cal = linalg.calculus_for(A, linalg.ENTIRE)
    assert cal.method == "spectral"
    np.testing.assert_allclose(cal.real(np.exp(cal.points)), linalg.expm(A), rtol=1e-10, atol=1e-12)


def test_contour_calculus_on_jordan_block():
    J = np.array([[-2.0, 1.0, 0.0], [0.0, -2.0, 1.0], [0.0, 0.0, -2.0]])
    cal = linalg.calculus_for(-J, linalg.RIGHT_HALF_PLANE, probes=[np.sqrt])
    assert cal.method != "spectral"
    R = cal.real(np.sqrt(cal.points), tol=1e-8)
    np.testing.assert_allclose(R @ R, -J, atol=1e-9)


def test_expm_matches_eig(rng):
    A = rng.normal(size=(4, 4))
    w, V = np.linalg.eig(A)
    ref = (V * np.exp(w)) @ np.linalg.inv(V)
    np.testing.assert_allclose(linalg.expm(A), ref.real, rtol=1e-11, atol=1e-12)


def test_matfn_series_geometric():
    A = np.array([[0.2, 0.1], [0.0, 0.3]])
    S = linalg.matfn_series(A, lambda k: 1.0)
    np.testing.assert_allclose(S, np.linalg.inv(np.eye(2) - A), atol=1e-13)
