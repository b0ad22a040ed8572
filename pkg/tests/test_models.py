import numpy as np
import pytest

from levyme import medist
from levyme.errors import BranchCut, DomainError
from levyme.models import BrownianDrift, CramerLundbergME, Stable, phi_matrix, psi_matrix

# independent oracles: numpy eig of -T with theta^{2/3} on the eigenvalues,
# and mpmath root finding for the Cramer-Lundberg exponent
GOLDEN_PHI_ORACLE = np.array([
    [1.133565008793577, 9.789552135316136, -10.459560873360966],
    [-1.491094351628203, 1.6371686986318479, 0.735688816870797],
    [-0.9940629010854685, 0.4247791324212325, 1.4904592112471977],
])
CL_PHI = {0.5: 0.3903882032022076, 2.0: 1.2807764064044151}


def test_stable_psi_and_phi():
    m = Stable(1.5)
    assert m.psi(4.0) == pytest.approx(8.0)
    assert m.phi(8.0) == pytest.approx(4.0)
    z = 1.0 + 2.0j
    assert complex(m.psi(m.phi(z))) == pytest.approx(z, rel=1e-13)
    with pytest.raises(BranchCut):
        m.psi(-1.0 + 0j)
    with pytest.raises(DomainError):
        Stable(0.9)


def test_brownian_phi():
    m = BrownianDrift(1.0, 0.5)
    q = 2.0
    assert m.phi(q) == pytest.approx(-0.5 + np.sqrt(0.25 + 2 * q))
    assert not m.bounded_variation
    assert m.w0 == 0.0


def test_cl_phi_oracle():
    m = CramerLundbergME(2.0, 1.0, medist.exponential(1.0))
    for q, ref in CL_PHI.items():
        assert float(np.real(m.phi(q))) == pytest.approx(ref, rel=1e-13)
    assert m.bounded_variation
    assert m.w0 == pytest.approx(0.5)


def test_phi_zero_with_negative_drift():
    m = BrownianDrift(1.0, -1.0)
    assert float(np.real(m.phi(0.0))) == pytest.approx(2.0)


def test_golden_phi_matrix(cos2):
    ph = phi_matrix(Stable(1.5), cos2)
    np.testing.assert_allclose(ph.value, GOLDEN_PHI_ORACLE, atol=1e-10)
    assert ph.residual < 1e-9


def test_phi_matrix_spectrum(cos2, families):
    for m in families:
        ph = phi_matrix(m, cos2)
        got = np.sort_complex(np.linalg.eigvals(ph.value))
        np.testing.assert_allclose(got, np.sort_complex(ph.eigenvalues), atol=1e-9)


def test_psi_of_phi_recovers_generator(families):
    d = medist.erlang(3, 2.0)
    for m in families:
        ph = phi_matrix(m, d)
        np.testing.assert_allclose(psi_matrix(m, ph.value), -d.T, atol=1e-7)
        assert ph.is_sub_intensity()
