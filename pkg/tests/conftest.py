import numpy as np
import pytest

from levyme import medist
from levyme.models import BrownianDrift, CramerLundbergME, Stable


@pytest.fixture(scope="session")
def cos2():
    return medist.cos2_horizon()


@pytest.fixture(scope="session")
def families():
    return [Stable(1.5), BrownianDrift(1.0, 0.5), CramerLundbergME(2.0, 1.0, medist.exponential(1.0))]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
