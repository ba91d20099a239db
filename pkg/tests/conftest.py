import numpy as np
import pytest

from gkp_breeding import TruncationPolicy


@pytest.fixture(scope="session")
def policy():
    return TruncationPolicy()


@pytest.fixture(scope="session")
def small_policy():
    return TruncationPolicy(dim=14)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
