"""
Pytest configuration and fixtures for cartankit tests
"""

import numpy as np
import pytest

from services.group import make_group

# No path manipulation needed - tests run from project root


@pytest.fixture
def sl3():
    return make_group("SL3")


@pytest.fixture
def so23():
    return make_group("SO2n", 3)


@pytest.fixture
def so24():
    return make_group("SO2n", 4)


@pytest.fixture
def so25():
    return make_group("SO2n", 5)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
