import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qaop.emulation import NoiseConfig, noisy_angle, noisy_eigenvalue


class TestNoisyEigenvalue:
    @pytest.mark.parametrize("mode", ["exact", "grid", "stochastic"])
    def test_zero_eps_is_identity(self, mode):
        assert noisy_eigenvalue(0.3712, 0.0, mode, seed=1) == 0.3712

    def test_grid_rounding(self):
        assert noisy_eigenvalue(0.37, 0.1, "grid") == pytest.approx(0.4, abs=1e-15)

    def test_grid_never_rounds_to_zero(self):
        assert noisy_eigenvalue(0.004, 0.01, "grid") == 0.01

    def test_stochastic_bound_monte_carlo(self):
        x = np.full(10_000, 0.5)
        out = noisy_eigenvalue(x, 1e-3, "stochastic", seed=7)
        dev = np.abs(out - x)
        assert dev.max() <= 1e-3
        assert dev.max() > 0.9e-3  # the draws actually fill the interval

    def test_stochastic_is_seeded(self):
        x = np.linspace(0.1, 1, 20)
        a = noisy_eigenvalue(x, 1e-2, "stochastic", seed=3)
        b = noisy_eigenvalue(x, 1e-2, "stochastic", seed=3)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, noisy_eigenvalue(x, 1e-2, "stochastic", seed=4))

    @given(st.floats(1e-6, 1), st.floats(1e-6, 0.5), st.integers(0, 1000))
    def test_stays_positive_and_within_bound(self, value, eps, seed):
        for mode in ("grid", "stochastic"):
            out = noisy_eigenvalue(value, eps, mode, seed=seed)
            assert out > 0
            assert abs(out - value) <= eps * (1 + 1e-12)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            noisy_eigenvalue(0.0, 0.1, "grid")


class TestNoisyAngle:
    def test_grid_step_is_eps_pi(self):
        out = noisy_angle(0.7931, 0.01, "grid")
        assert out / (0.01 * math.pi) == pytest.approx(round(out / (0.01 * math.pi)))
        assert abs(out - 0.7931) <= 0.01 * math.pi / 2

    @given(st.floats(1e-3, math.pi / 2), st.floats(1e-8, 1e-2), st.integers(0, 1000))
    def test_stochastic_bound(self, theta, eps, seed):
        out = noisy_angle(theta, eps, "stochastic", seed=seed)
        assert 0 < out <= math.pi / 2
        assert abs(out - theta) <= eps

    def test_exact(self):
        assert noisy_angle(0.5, 0.1, "exact") == 0.5


class TestNoiseConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            NoiseConfig(eps1=-1)
        with pytest.raises(ValueError):
            NoiseConfig(mode="gaussian")
        with pytest.raises(ValueError):
            NoiseConfig(eta=1.5)

    def test_exactness(self):
        assert NoiseConfig().is_exact
        assert NoiseConfig(mode="grid").is_exact
        assert not NoiseConfig(eps1=1e-3, mode="grid").is_exact
        assert NoiseConfig(eps1=1e-3, mode="exact").is_exact

    def test_round_trip(self):
        cfg = NoiseConfig(eps1=1e-3, eps2=1e-4, mode="stochastic", seed=9)
        assert NoiseConfig(**cfg.to_dict()) == cfg
