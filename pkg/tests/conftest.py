import numpy as np
import pytest

from forceforge.core import VideoDims


@pytest.fixture
def small_dims():
    """Desk-scale dims: full frame count, reduced spatial resolution."""
    return VideoDims(frames=9, height=60, width=90)


@pytest.fixture
def default_dims():
    return VideoDims()


@pytest.fixture
def rng():
    return np.random.default_rng(0)
