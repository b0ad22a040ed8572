import numpy as np
import pytest

from levyme import fluct, medist, validate
from levyme.errors import DomainError, EigenvalueCollision
from levyme.models import BrownianDrift, CramerLundbergME, Stable
from levyme.scale import ScaleEval

# functional calculus via numpy eig with mpmath Mittag-Leffler values
P_UP = {0.1: 0.8635492611140195, 0.5: 0.5038106259496422, 1.0: 0.30325307781453364}
TWO_SIDED = {0.3: 0.6189006053392936, 0.7: 0.30330848112694897}


@pytest.fixture(scope="module")
def ev_stable():
    return ScaleEval(Stable(1.5), medist.cos2_horizon())


@pytest.fixture(scope="module")
def evs():
    hz = medist.erlang(2, 1.5)
    return [ScaleEval(m, hz) for m in
            (Stable(1.5), BrownianDrift(1.0, 0.5), CramerLundbergME(2.0, 1.0, medist.exponential(1.0)))]


@pytest.mark.parametrize("x,ref", sorted(P_UP.items()))
def test_p_up_oracle(ev_stable, x, ref):
    assert fluct.p_up_before_horizon(ev_stable, x) == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("x,ref", sorted(TWO_SIDED.items()))
def test_two_sided_oracle(ev_stable, x, ref):
    assert fluct.p_two_sided_up(ev_stable, x, 1.0 - x) == pytest.approx(ref, rel=1e-9)


def test_exponential_horizon_reduces_to_scalar():
    q, x = 1.7, 0.8
    m = BrownianDrift(1.0, 0.3)
    ev = ScaleEval(m, medist.exponential(q))
    assert fluct.p_up_before_horizon(ev, x) == pytest.approx(np.exp(-float(np.real(m.phi(q))) * x))


def test_two_sided_bounded_by_one_sided(evs):
    for ev in evs:
        for x in [0.2, 1.0]:
            assert fluct.p_two_sided_up(ev, x, 0.5) <= fluct.p_up_before_horizon(ev, x) + 1e-12


def test_p_up_monotone(evs):
    xs = np.linspace(0.0, 3.0, 13)
    for ev in evs:
        p = [fluct.p_up_before_horizon(ev, x) for x in xs]
        assert np.all(np.diff(p) <= 1e-12)
        assert p[0] == pytest.approx(1.0)


def test_exit_probabilities_sum_below_one(evs):
    for ev in evs:
        # start 0.6 above the lower barrier, 0.4 below the upper one
        up = fluct.p_two_sided_up(ev, 0.4, 0.6)
        down = fluct.down_exit_two_sided(ev, 0.6, 1.0)
        assert 0.0 <= up + down <= 1.0 + 1e-10


def test_down_one_sided_far_start(evs):
    for ev in evs:
        near = fluct.down_exit_one_sided(ev, 0.5)
        far = fluct.down_exit_one_sided(ev, 30.0)
        assert 0.0 <= far <= near <= 1.0
        assert far < 0.01


def test_wh_inf_cdf_properties(evs):
    for ev in evs:
        atom = fluct.wh_inf_atom(ev)
        vals = [fluct.wh_inf_cdf(ev, y) for y in (0.0, 0.5, 2.0, 8.0)]
        assert vals[0] == pytest.approx(atom, abs=1e-10)
        assert np.all(np.diff(vals) >= -1e-12)
        assert vals[-1] <= 1.0 + 1e-10


def test_wh_inf_density_is_cdf_derivative(evs):
    for ev in evs:
        y, h = 0.7, 1e-4
        fd = (fluct.wh_inf_cdf(ev, y + h) - fluct.wh_inf_cdf(ev, y - h)) / (2 * h)
        assert fluct.wh_inf_density(ev, y) == pytest.approx(fd, rel=1e-5, abs=1e-9)


def test_option_price_classical_case():
    q, u = 2.0, 0.5
    m = Stable(1.5)
    ev = ScaleEval(m, medist.exponential(q))
    _, want = validate.scalar_formulas(m, q, u, 0.5, 0.0)["option_price"]
    assert fluct.option_price(ev, u) == pytest.approx(float(np.real(want)), rel=1e-10)
    assert fluct.option_price(ev, u) >= 0.0


def test_option_price_removable_singularity():
    # psi(1) = 1 = q makes (Phi - 1)/(psi(1) - q) a 0/0 limit
    m = Stable(1.5)
    at = fluct.option_price(ScaleEval(m, medist.exponential(1.0)), 0.4)
    near = fluct.option_price(ScaleEval(m, medist.exponential(1.0 + 1e-5)), 0.4)
    assert at == pytest.approx(near, rel=1e-4)


def test_option_price_rejects_beta_eigenvalue(ev_stable):
    beta = float(np.real(ev_stable.phi_points[0]))
    if abs(ev_stable.phi_points[0].imag) < 1e-12:
        with pytest.raises(EigenvalueCollision):
            fluct.option_price(ev_stable, 0.2, beta=beta)


def test_two_barrier_density_nonnegative(evs):
    for ev in evs:
        vals = [fluct.two_barrier_density(ev, 1.0, 2.0, x) for x in (-0.9, 0.0, 0.5, 1.9)]
        assert min(vals) >= -1e-12


def test_ph_observation_ruin_requires_ph(ev_stable, evs):
    with pytest.raises(DomainError):
        fluct.ph_observation_ruin(ev_stable, 1.0)
    p = fluct.ph_observation_ruin(evs[1], 1.0)
    assert 0.0 <= p <= 1.0


def test_negative_start_rejected(evs):
    with pytest.raises(DomainError):
        fluct.p_up_before_horizon(evs[0], -1.0)
