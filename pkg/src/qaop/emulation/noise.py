"""Precision models for phase estimation and amplitude estimation.

Phase estimation is modeled by its error contract: an eigenvalue read out
within ``eps1``. Amplitude estimation returns an angle within ``eps2``.
Three modes are offered:

``exact``
    identity, regardless of the eps values;
``grid``
    deterministic rounding to a register grid (``eps1`` for eigenvalues,
    ``eps2 * pi`` for angles);
``stochastic``
    a uniform draw inside the error bound from a seeded generator.
"""

import math
from dataclasses import dataclass, asdict

import numpy as np

from .._validation import check_choice, check_real

MODES = ("exact", "grid", "stochastic")


@dataclass(frozen=True)
class NoiseConfig:
    """Error budget of one pipeline run.

    ``eps0``, ``eta`` and ``t0`` only feed the cost model.
    """

    eps1: float = 0.0
    eps2: float = 0.0
    eps0: float = 0.0
    mode: str = "exact"
    seed: int = 0
    eta: float = 0.25
    t0: float = 1.0

    def __post_init__(self):
        for name in ("eps1", "eps2", "eps0"):
            check_real(getattr(self, name), name, nonnegative=True)
        check_choice(self.mode, "mode", MODES)
        check_real(self.eta, "eta", positive=True)
        if self.eta >= 1:
            raise ValueError(f"eta must be < 1, got {self.eta}")
        check_real(self.t0, "t0", positive=True)

    @property
    def is_exact(self):
        return self.mode == "exact" or (self.eps1 == 0 and self.eps2 == 0)

    def rng(self):
        return np.random.default_rng(self.seed)

    def to_dict(self):
        return asdict(self)


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def noisy_eigenvalue(true_value, eps1, mode="exact", seed=None):
    """Eigenvalue as read from a phase-estimation register.

    Parameters
    ----------
    true_value : float or ndarray
        Values in (0, 1].
    eps1 : float
        Error bound.
    mode : {"exact", "grid", "stochastic"}
    seed : int or numpy.random.Generator, optional
        Only used in stochastic mode. Pass a Generator to draw a stream.

    Notes
    -----
    Grid rounding that lands on 0 returns ``eps1`` instead. A stochastic
    draw that would be nonpositive returns ``true_value / 2``. Both keep the
    deviation within ``eps1`` and the value positive.
    """
    check_choice(mode, "mode", MODES)
    eps1 = check_real(eps1, "eps1", nonnegative=True)
    x = np.asarray(true_value, dtype=float)
    scalar = x.ndim == 0
    if np.any(x <= 0):
        raise ValueError("eigenvalues must be positive")
    if mode == "exact" or eps1 == 0:
        out = x.copy()
    elif mode == "grid":
        out = np.round(x / eps1) * eps1
        out = np.where(out <= 0, eps1, out)
    else:
        out = x + _rng(seed).uniform(-eps1, eps1, size=x.shape)
        out = np.where(out <= 0, x / 2, out)
    return float(out) if scalar else out


def noisy_angle(theta, eps2, mode="exact", seed=None):
    """Angle returned by amplitude estimation, kept in ``(0, pi/2]``.

    Grid mode rounds to a multiple of ``eps2 * pi`` (so its worst error is
    ``eps2 * pi / 2``); stochastic mode adds uniform noise in
    ``[-eps2, eps2]``.
    """
    check_choice(mode, "mode", MODES)
    eps2 = check_real(eps2, "eps2", nonnegative=True)
    theta = check_real(theta, "theta", positive=True)
    if mode == "exact" or eps2 == 0:
        return theta
    if mode == "grid":
        step = eps2 * math.pi
        out = round(theta / step) * step
        if out <= 0:
            out = step
    else:
        out = theta + float(_rng(seed).uniform(-eps2, eps2))
        if out <= 0:
            out = theta / 2
    return min(out, math.pi / 2)
