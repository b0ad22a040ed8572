import numpy as np
import pytest
from scipy import integrate, stats

from levyme import medist
from levyme.errors import ConjugationViolation, DomainError, DomainViolation

# independent mpmath quadrature of (17/9) e^{-x} cos^2(2x)
COS2_MEAN = 0.895424836601307075
COS2_CDF_1 = 0.604047957436107179


def cos2_density(x):
    return 17.0 / 9.0 * np.exp(-x) * np.cos(2 * x) ** 2


def test_cos2_density_closed_form(cos2):
    x = np.linspace(0, 6, 31)
    np.testing.assert_allclose(medist.density(cos2, x), cos2_density(x), atol=1e-13)


def test_cos2_moments(cos2):
    assert medist.mean(cos2) == pytest.approx(COS2_MEAN, rel=1e-13)
    assert medist.cdf(cos2, [1.0])[0] == pytest.approx(COS2_CDF_1, rel=1e-12)
    assert cos2.defect == pytest.approx(1.0, abs=1e-12)


def test_laplace_matches_quadrature(cos2):
    s = 0.7 + 0.4j
    ref = integrate.quad(lambda x: cos2_density(x) * np.exp(-s.real * x) * np.cos(s.imag * x), 0, 60)[0] \
        - 1j * integrate.quad(lambda x: cos2_density(x) * np.exp(-s.real * x) * np.sin(s.imag * x), 0, 60)[0]
    assert medist.laplace(cos2, s) == pytest.approx(ref, abs=1e-10)
    with pytest.raises(DomainError):
        medist.laplace(cos2, -1.0)


def test_erlang_against_scipy():
    d = medist.erlang(3, 2.0)
    x = np.array([0.1, 0.5, 1.0, 3.0])
    ref = stats.gamma(3, scale=0.5)
    np.testing.assert_allclose(medist.density(d, x), ref.pdf(x), rtol=1e-10)
    np.testing.assert_allclose(medist.cdf(d, x), ref.cdf(x), rtol=1e-10)
    np.testing.assert_allclose(medist.tail(d, x), ref.sf(x), rtol=1e-10)


def test_me_rep_validation():
    with pytest.raises(DomainViolation):
        medist.me_rep([1.0], [[0.5]])
    with pytest.raises(DomainError):
        medist.me_rep([1.0, 0.0], [[-1.0]])
    # negative density somewhere on the grid
    with pytest.raises(DomainViolation):
        medist.me_rep([2.0, -1.0], [[-1.0, 0.0], [0.0, -3.0]])


def test_kill_min_and_discount():
    d = medist.exponential(2.0)
    m = medist.kill_min(d, 3.0)
    assert medist.mean(m) == pytest.approx(1 / 5)
    k = medist.kill_discount(d, 3.0)
    assert k.defect == pytest.approx(2 / 5)
    with pytest.raises(DomainError):
        medist.kill_min(d, 0.0)


def test_canonicalize_preserves_law():
    d = medist.me_rep([0.25, 0.5], [[-1.0, 0.5], [0.0, -2.0]], [1.5, 2.0], check_grid=False)
    assert not d.canonical
    c = medist.canonicalize(d)
    assert c.canonical
    x = np.linspace(0.0, 4.0, 9)
    np.testing.assert_allclose(medist.density(c, x), medist.density(d, x), atol=1e-13)


def test_from_exp_terms_conjugate_pair():
    terms = [(17 / 18, 1.0), (17 / 36, 1 + 4j), (17 / 36, 1 - 4j)]
    d = medist.from_exp_terms(terms)
    x = np.linspace(0, 5, 11)
    np.testing.assert_allclose(medist.density(d, x), cos2_density(x), atol=1e-12)
    with pytest.raises(ConjugationViolation):
        medist.from_exp_terms([(1.0, 1 + 1j)])


def test_cos4_file_is_a_density():
    d = medist.cos4_order5()
    assert d.p == 5
    f = medist.density(d, np.linspace(0, 20, 401))
    assert f.min() > -1e-12
    assert d.defect == pytest.approx(1.0, abs=1e-9)


def test_read_exp_terms_reports_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("re_c,im_c,re_lambda,im_lambda\n1,0,1,0\nx,0,1,0\n")
    with pytest.raises(DomainError, match=":3:"):
        medist.read_exp_terms(path)


def test_sampling_matches_cdf(cos2, rng):
    xs = medist.sample(cos2, rng, 20000)
    res = stats.kstest(xs, lambda x: medist.cdf(cos2, np.atleast_1d(x)))
    assert res.pvalue > 1e-3


def test_quantile_inverts_cdf():
    d = medist.erlang(2, 3.0)
    u = np.array([0.01, 0.3, 0.9, 0.999])
    np.testing.assert_allclose(medist.cdf(d, medist.quantile(d, u)), u, atol=1e-9)


def test_is_ph(cos2):
    assert medist.is_ph(medist.erlang(2, 1.0))
    assert not medist.is_ph(cos2)
