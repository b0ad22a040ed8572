import csv

import numpy as np
import pytest

from levyme import fluct, mcsim, medist, validate
from levyme.errors import DomainError, DomainViolation
from levyme.models import BrownianDrift, CramerLundbergME, Stable
from levyme.scale import ScaleEval


def z_score(est, se, want):
    return abs(est - want) / se


def test_stable_alpha_two_is_gaussian():
    rng = mcsim.block_rng(1, 0)
    x = mcsim.stable_increment(2.0, 1.0, rng, size=200_000)
    # E exp(theta X) = exp(theta^2) means variance 2
    assert np.var(x) == pytest.approx(2.0, rel=0.02)


def test_stable_exponential_moment():
    alpha, t, theta = 1.5, 0.7, 0.5
    rng = mcsim.block_rng(2, 0)
    v = np.exp(theta * mcsim.stable_increment(alpha, t, rng, size=400_000))
    est, se = v.mean(), v.std(ddof=1) / np.sqrt(len(v))
    assert z_score(est, se, np.exp(t * theta**alpha)) < 4


def test_block_rng_streams_differ():
    a = mcsim.block_rng(5, 0).random(4)
    b = mcsim.block_rng(5, 1).random(4)
    c = mcsim.block_rng(5, 0).random(4)
    assert not np.allclose(a, b)
    np.testing.assert_array_equal(a, c)


def test_config_validation():
    with pytest.raises(DomainError):
        mcsim.SimConfig(h=0.0)


@pytest.mark.parametrize("model", [BrownianDrift(1.0, 0.3), CramerLundbergME(2.0, 1.0, medist.exponential(1.0))])
def test_passage_before_exponential_time(model):
    q, x = 2.0, 0.5
    cfg = mcsim.SimConfig(paths=6000, seed=3)
    s = mcsim.simulate_paths(model, medist.exponential(q), cfg)
    est, se = mcsim.estimate(s, mcsim.f_up(x))
    assert z_score(est, se, np.exp(-float(np.real(model.phi(q))) * x)) < 3


def test_pure_drift_is_deterministic():
    s = mcsim.simulate_paths(BrownianDrift(0.0, 1.5), medist.exponential(1.0), mcsim.SimConfig(paths=200, seed=4))
    np.testing.assert_allclose(s.terminal, 1.5 * s.horizon, rtol=1e-9, atol=1e-9)
    np.testing.assert_allclose(s.sup, s.terminal, atol=1e-9)


def test_seeded_runs_are_reproducible():
    model, hz = Stable(1.5), medist.cos2_horizon()
    cfg = mcsim.SimConfig(paths=300, seed=99, block=128)
    a = mcsim.simulate_paths(model, hz, cfg)
    b = mcsim.simulate_paths(model, hz, cfg)
    np.testing.assert_array_equal(a.terminal, b.terminal)
    c = mcsim.simulate_paths(model, hz, mcsim.SimConfig(paths=300, seed=100, block=128))
    assert not np.array_equal(a.terminal, c.terminal)


def test_grid_refinement_is_consistent():
    model, hz = Stable(1.5), medist.cos2_horizon()
    ev = ScaleEval(model, hz)
    want = fluct.p_up_before_horizon(ev, 0.5)
    for h in (2e-3, 1e-3):
        s = mcsim.simulate_paths(model, hz, mcsim.SimConfig(h=h, paths=4000, seed=6))
        est, se = mcsim.estimate(s, mcsim.f_up(0.5))
        assert z_score(est, se, want) < 3


def test_barrier_records():
    spec = mcsim.BarrierSpec(up=(0.5,), down=(0.5,), reflect=((0.2, 1.0),))
    s = mcsim.simulate_paths(BrownianDrift(1.0, 0.0), medist.exponential(1.0),
                             mcsim.SimConfig(paths=500, seed=8), spec)
    j = s.up_index(0.5)
    hit = np.isfinite(s.up_time[:, j])
    np.testing.assert_array_equal(hit, s.sup > 0.5)
    assert np.all(s.up_time[hit, j] <= s.horizon[hit] + 1e-12)
    assert np.all(s.up_inf[hit, j] <= 0.0)
    assert s.reflect_index(0.2, 1.0) == 0
    with pytest.raises(DomainError):
        s.down_index(0.7)
    assert s[0].horizon == s.horizon[0]


def test_dump_writes_paths(tmp_path):
    out = tmp_path / "paths.csv"
    mcsim.simulate_paths(Stable(1.5), medist.exponential(2.0), mcsim.SimConfig(paths=50, seed=9),
                         dump=str(out), dump_paths=3)
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["path_id", "time", "value"]
    assert len({r[0] for r in rows[1:]}) == 3


def test_capped_fraction():
    cfg = mcsim.SimConfig(paths=4000, seed=10, horizon_cap=1.0, h=1e-2)
    s = mcsim.simulate_paths(BrownianDrift(1.0, 0.0), medist.exponential(1.0), cfg)
    assert s.capped == pytest.approx(np.exp(-1.0), abs=0.03)
    assert s.horizon.max() <= 1.0


def test_phase_tracking_single_phase():
    q = 1.0
    model = BrownianDrift(1.0, 0.0)
    g = mcsim.phase_tracked_simulate(model, medist.exponential(q), mcsim.SimConfig(paths=4000, seed=11))
    assert z_score(g.value[0, 0], g.se[0, 0], -float(np.real(model.phi(q)))) < 4


def test_phase_tracking_needs_ph():
    with pytest.raises(DomainViolation):
        mcsim.phase_tracked_simulate(Stable(1.5), medist.cos2_horizon(), mcsim.SimConfig(paths=10))


def test_observation_ruin_against_formula():
    model, q, x = BrownianDrift(1.0, 0.5), 2.0, 0.8
    est, se, capped = mcsim.observation_ruin_simulate(model, medist.exponential(q), x,
                                                      mcsim.SimConfig(paths=3000, seed=12))
    assert capped == 0.0
    assert z_score(est, se, validate.observation_ruin_scalar(model, q, x)) < 3


def test_level_zero_is_passed_immediately():
    s = mcsim.simulate_paths(Stable(1.5), medist.exponential(1.0), mcsim.SimConfig(paths=100, seed=13))
    est, se = mcsim.estimate(s, mcsim.f_up(0.0))
    assert est == 1.0 and se == 0.0
