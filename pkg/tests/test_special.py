import numpy as np
import pytest
from scipy import special as sp

from levyme import linalg
from levyme.errors import DomainError
from levyme.special import (
    MLParams,
    lower_incomplete_gamma,
    mittag_leffler,
    mittag_leffler_matrix,
    mittag_leffler_matrix_series,
    regularized_lower_gamma,
)

# mpmath series at 30 digits
ML_ORACLE = [
    (1.5, 1.5, 2.0, 2.548336719072856),
    (1.5, 1.5, -3.0, 0.2149766677682693),
    (0.8, 1.2, 1 + 2j, -1.3697101322657554 + 1.2740388421727409j),
    (1.5, 0.5, -1.5, -0.38323852502395567),
    (1.9, 1.9, 10.0, 5.083943203105234),
]


@pytest.mark.parametrize("a,b,z,ref", ML_ORACLE)
def test_mittag_leffler_oracle(a, b, z, ref):
    assert complex(mittag_leffler(a, b, z)) == pytest.approx(ref, rel=1e-12)


def test_mittag_leffler_elementary_cases():
    z = np.array([-2.0, 0.5, 3.0])
    np.testing.assert_allclose(mittag_leffler(1.0, 1.0, z).real, np.exp(z), rtol=1e-13)
    np.testing.assert_allclose(mittag_leffler(2.0, 1.0, z**2).real, np.cosh(z), rtol=1e-12)


def test_mittag_leffler_rejects_bad_params():
    with pytest.raises(DomainError):
        MLParams(0.0, 1.0)


def test_mittag_leffler_matrix_routes_agree():
    rng = np.random.default_rng(3)
    M = rng.normal(size=(3, 3))
    p = MLParams(1.5, 1.5)
    np.testing.assert_allclose(mittag_leffler_matrix(p, M), mittag_leffler_matrix_series(p, M), atol=1e-11)
    np.testing.assert_allclose(mittag_leffler_matrix(MLParams(1.0, 1.0), M), linalg.expm(M), atol=1e-11)


@pytest.mark.parametrize("beta", [0.3, 1.5, 4.0, 60.0])
@pytest.mark.parametrize("y", [0.01, 0.9, 3.0, 25.0, 80.0])
def test_regularized_gamma_vs_scipy(beta, y):
    assert regularized_lower_gamma(beta, y) == pytest.approx(sp.gammainc(beta, y), rel=1e-12, abs=1e-300)


def test_lower_incomplete_gamma_vs_scipy():
    for beta, y in [(0.5, 0.2), (2.5, 1.0), (3.0, 7.0)]:
        ref = sp.gammainc(beta, y) * sp.gamma(beta)
        assert lower_incomplete_gamma(beta, y) == pytest.approx(ref, rel=1e-12)
    assert lower_incomplete_gamma(2.0, 0.0) == 0.0
    with pytest.raises(DomainError):
        lower_incomplete_gamma(-1.0, 1.0)
