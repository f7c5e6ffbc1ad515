import numpy as np
import pytest

from paraboloid_billiard import MirrorConfig, random_interior_states


@pytest.fixture
def mirror():
    return MirrorConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_states(rng, mirror):
    return random_interior_states(rng, 20, mirror)
