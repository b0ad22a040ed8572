import numpy as np
import pytest
from scipy import integrate

from levyme import medist
from levyme.models import BrownianDrift, CramerLundbergME, Stable
from levyme.scale import MatrixScale, ScaleEval, scalar_scale, w_matrix_series_oracle

# mpmath Mittag-Leffler series (stable) and de Hoog Laplace inversion (CL)
STABLE_W = [
    (1.0, 0.5, 0.9307498805124441),
    (1.0, 2.0, 4.890506530633147),
    (2 + 1j, 1.0, 2.3981672841337796 + 0.9494340258934136j),
    (5.0, 3.0, 2515.2019822942098),
    (1 + 4j, 1.5, -3.950798971468447 + 2.721467790055433j),
]
STABLE_W_PRIME = [
    (1.0, 0.5, 1.353759361619746),
    (2 + 1j, 1.0, 3.517309967520705 + 2.753797432764712j),
]
CL_W = [(0.5, 1.0, 0.9045739897438742), (2.0, 0.7, 1.3251003942693675)]


def w(model, q, x):
    return complex(scalar_scale(model).w([x], [q])[0, 0])


@pytest.mark.parametrize("q,x,ref", STABLE_W)
def test_stable_w_oracle(q, x, ref):
    assert w(Stable(1.5), q, x) == pytest.approx(ref, rel=1e-11)


@pytest.mark.parametrize("q,x,ref", STABLE_W_PRIME)
def test_stable_w_prime_oracle(q, x, ref):
    got = complex(scalar_scale(Stable(1.5)).w_prime([x], [q])[0, 0])
    assert got == pytest.approx(ref, rel=1e-11)


@pytest.mark.parametrize("q,x,ref", CL_W)
def test_cl_w_oracle(q, x, ref):
    m = CramerLundbergME(2.0, 1.0, medist.exponential(1.0))
    assert w(m, q, x) == pytest.approx(ref, rel=1e-10)


def test_brownian_w_closed_form():
    s, g, q = 1.3, 0.4, 0.8
    m = BrownianDrift(s, g)
    disc = np.sqrt(g**2 + 2 * q * s**2)
    r1, r2 = (-g + disc) / s**2, (-g - disc) / s**2
    for x in [0.0, 0.3, 2.0, 7.0]:
        ref = 2 / s**2 * (np.exp(r1 * x) - np.exp(r2 * x)) / (r1 - r2)
        assert w(m, q, x).real == pytest.approx(ref, rel=1e-12, abs=1e-15)


def test_w_at_zero(families):
    for m in families:
        assert w(m, 1.0, 0.0) == pytest.approx(m.w0)


def test_w_prime_by_finite_differences(families):
    for m in families:
        sc = scalar_scale(m)
        x, h = 1.2, 1e-5
        fd = (sc.w([x + h], [1.5])[0, 0] - sc.w([x - h], [1.5])[0, 0]) / (2 * h)
        assert complex(sc.w_prime([x], [1.5])[0, 0]) == pytest.approx(complex(fd), rel=1e-7)


def test_w_diff_tail_integrates(families):
    q = 1.3
    for m in families:
        sc = scalar_scale(m)
        phi = float(np.real(sc.phi([q])[0]))
        total = phi / q - m.w0
        assert complex(np.ravel(sc.w_diff_tail([0.0], q))[0]) == pytest.approx(total, rel=1e-9)
        x = 0.8
        part = integrate.quad(lambda y: sc.w_diff([y], [q])[0, 0].real, 0, x, epsabs=1e-12)[0]
        assert complex(np.ravel(sc.w_diff_tail([x], q))[0]).real == pytest.approx(total - part, rel=1e-8)


def test_laplace_transform_of_w(families):
    q = 0.7
    for m in families:
        sc = scalar_scale(m)
        theta = float(np.real(sc.phi([q])[0])) + 2.0
        # the integrand decays like exp(-2y)
        val = integrate.quad(lambda y: np.exp(-theta * y) * sc.w([y], [q])[0, 0].real, 0, 25, limit=200)[0]
        assert val == pytest.approx(1.0 / (float(np.real(m.psi(theta))) - q), rel=1e-8)


def test_matrix_scale_matches_eig_route(cos2):
    ev = ScaleEval(Stable(1.5), cos2)
    Q = -cos2.T
    lam, V = np.linalg.eig(Q)
    sc = scalar_scale(Stable(1.5))
    ref = (V * sc.w([1.0], lam)[0]) @ np.linalg.inv(V)
    np.testing.assert_allclose(ev.w(1.0), ref.real, atol=1e-10)
    np.testing.assert_allclose(ev.w(-0.5), 0.0)


def test_matrix_w_series_oracle(cos2):
    ev = ScaleEval(BrownianDrift(1.0, 0.5), cos2)
    np.testing.assert_allclose(w_matrix_series_oracle(ev, 0.6, h=2.5e-4), ev.w(0.6), atol=1e-5)


def test_z_at_theta_zero_is_one_plus_q_int_w():
    m = Stable(1.5)
    Q = np.array([[1.0, 0.2], [0.1, 2.0]])
    ms = MatrixScale(m, Q)
    np.testing.assert_allclose(ms.z(0.0, 0.9).value, np.eye(2) + Q @ ms.w_int(0.9), atol=1e-11)
    np.testing.assert_allclose(ms.z(0.0, 0.0).value, np.eye(2))
