import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

from qaop.spectral import SpectralModel  # noqa: E402


@pytest.fixture
def k2_model():
    """``sigma^2 = (1, 0.25)``, the small worked instance used across modules."""
    return SpectralModel.from_sigma_sq([1.0, 0.25])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
