"""Analytic quantities of the scalar iteration: kappa recurrence, rho, c bounds.

Everything here is cheap closed-form arithmetic used both by the pipeline
emulators (to size rotations and amplitude estimation) and by the property
tests (to check the inequalities on actual iterates).
"""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_positive_int, check_real
from .exceptions import BoundViolation


def kappa_step(kappa_prev, a_prev, lambda2, kappa):
    """One step of the condition-number recurrence.

    ``(a + lambda2 kappa^2) kappa_prev / (a + lambda2 kappa_prev^2)`` where
    ``a`` is the largest squared entry of the previous iterate. It is an
    identity for the iterates (not an estimate) because, from the uniform
    start, beta stays sorted opposite to sigma.
    """
    kappa_prev = check_real(kappa_prev, "kappa_prev")
    if kappa_prev < 1.0:
        raise ValueError(f"kappa_prev must be >= 1, got {kappa_prev}")
    a_prev = check_real(a_prev, "a_prev", positive=True)
    if a_prev > 1.0 + 1e-12:
        raise ValueError(f"a_prev must lie in (0, 1], got {a_prev}")
    lambda2 = check_real(lambda2, "lambda2", positive=True)
    kappa = check_real(kappa, "kappa", positive=True)
    return (a_prev + lambda2 * kappa**2) * kappa_prev / (a_prev + lambda2 * kappa_prev**2)


@dataclass(frozen=True)
class KappaTrace:
    """Condition numbers and peak squared amplitudes along a run.

    ``kappa_seq[i]`` and ``a_seq[i]`` belong to iterate ``i``; index 0 is the
    uniform start (``kappa = 1``, ``a = 1/k``).
    """

    kappa_seq: np.ndarray
    a_seq: np.ndarray
    kappa: float
    lambda2: float

    @classmethod
    def from_solution(cls, solution, model, lambda2):
        k = model.k
        kap = np.concatenate(([1.0], solution.trace.kappa))
        a = np.concatenate(([1.0 / k], solution.trace.a))
        return cls(kap, a, model.kappa, float(lambda2))

    @classmethod
    def from_states(cls, betas, kappa, lambda2):
        betas = [np.asarray(b, dtype=float) for b in betas]
        kap = np.array([b.max() / b.min() for b in betas])
        a = np.array([b.max() ** 2 for b in betas])
        return cls(kap, a, float(kappa), float(lambda2))

    def predicted(self):
        """Recurrence values for iterates ``1 .. len - 1``."""
        return np.array([
            kappa_step(kp, ap, self.lambda2, self.kappa)
            for kp, ap in zip(self.kappa_seq[:-1], self.a_seq[:-1])
        ])

    def recurrence_residuals(self):
        """Relative gap between measured and recurrence kappa per step."""
        pred = self.predicted()
        return np.abs(pred - self.kappa_seq[1:]) / self.kappa_seq[1:]

    def sandwich_violations(self, rtol=1e-12):
        """Indices breaking the even-below / odd-above monotone pattern.

        Even iterates must be nondecreasing and at most kappa, odd iterates
        nonincreasing and at least kappa. Only meaningful when
        ``lambda2 * kappa > 1``.
        """
        bad = []
        kap, ref = self.kappa_seq, self.kappa
        tol = rtol * ref
        for i in range(len(kap)):
            if i % 2 == 0 and kap[i] > ref + tol:
                bad.append(i)
            elif i % 2 == 1 and kap[i] < ref - tol:
                bad.append(i)
            elif i >= 2:
                if i % 2 == 0 and kap[i] < kap[i - 2] - tol:
                    bad.append(i)
                elif i % 2 == 1 and kap[i] > kap[i - 2] + tol:
                    bad.append(i)
        return bad


def rho_param(model, lambda2, kappa_iter):
    """Rotation scale keeping ``rho * f(sigma_j, beta_j) <= 1``.

    Returns ``min(1/(2 lambda2 k kappa^2 kappa_iter), 1/(k kappa_iter (1 +
    lambda2 kappa^2)))``. The second term is the bound actually derived from
    the amplitude envelopes; the first is the simpler closed form, which is
    smaller than the second only when ``lambda2 kappa^2 >= 1``. Taking the
    minimum keeps the guarantee for every ``lambda2``.
    """
    lambda2 = check_real(lambda2, "lambda2", positive=True)
    kappa_iter = check_real(kappa_iter, "kappa_iter", positive=True)
    if kappa_iter < 1.0:
        raise ValueError(f"kappa_iter must be >= 1, got {kappa_iter}")
    k, kappa = model.k, model.kappa
    closed = 1.0 / (2.0 * lambda2 * k * kappa**2 * kappa_iter)
    derived = 1.0 / (k * kappa_iter * (1.0 + lambda2 * kappa**2))
    return min(closed, derived)


def rotation_factor(sigma_sq, beta, lambda2):
    """``f = (sigma^2 beta^2 + lambda2) / (sigma^2 beta^2)``."""
    sb2 = sigma_sq * beta * beta
    return (sb2 + lambda2) / sb2


def c_lower(k, lambda2):
    """``sqrt(1 + 2 k lambda2 + k^2 lambda2^2) = 1 + k lambda2``."""
    return 1.0 + k * lambda2


def c_cap(k, lambda2, kappa):
    """Closed-form ceiling ``1 + lambda2 sqrt(k) kappa^2`` on every ``c beta_j``."""
    return 1.0 + lambda2 * math.sqrt(k) * kappa**2


@dataclass(frozen=True)
class CBounds:
    c_lower: float
    c: float
    max_register: float
    c_cap: float


def c_bounds(state, model, lambda2, c=None, rtol=1e-12):
    """Check ``c_lower <= c`` and ``max_j c beta_j <= c_cap`` for an iterate.

    ``state`` is the iterate after the update and ``c`` the normalization
    that produced it (defaults to the last entry of ``state.c_history``).

    Raises
    ------
    BoundViolation
        If either inequality fails beyond relative rounding ``rtol``.
    """
    lambda2 = check_real(lambda2, "lambda2", positive=True)
    if c is None:
        c = state.c
    if c is None:
        raise ValueError("state has no c history; pass c explicitly")
    c = float(c)
    lo = c_lower(model.k, lambda2)
    cap = c_cap(model.k, lambda2, model.kappa)
    reg = c * float(max(state.beta))
    if c * c < (lo * lo) * (1 - rtol):
        raise BoundViolation(f"c^2 = {c * c!r} below (1 + k lambda2)^2 = {lo * lo!r}")
    if reg > cap * (1 + rtol):
        raise BoundViolation(f"max_j c beta_j = {reg!r} exceeds c_cap = {cap!r}")
    return CBounds(lo, c, reg, cap)


def sin_theta(c_i, c_cap_value, k):
    """``c_i / (c_cap sqrt(k))``, the amplitude read by amplitude estimation."""
    k = check_positive_int(k, "k")
    c_i = check_real(c_i, "c_i", positive=True)
    c_cap_value = check_real(c_cap_value, "c_cap", positive=True)
    s = c_i / (c_cap_value * math.sqrt(k))
    if s > 1.0 + 1e-12:
        raise BoundViolation(f"sin(theta) = {s!r} exceeds 1")
    return min(s, 1.0)


def beta_envelope_violations(beta, kappa_i):
    """Broken envelope inequalities for one unit-norm iterate.

    ``1/sqrt(k) <= max beta <= 1`` and ``1/(kappa_i sqrt(k)) <= min beta <=
    1/sqrt(k)``, each with relative slack 1e-12.
    """
    beta = np.asarray(beta, dtype=float)
    k = beta.size
    r = 1.0 / math.sqrt(k)
    t = 1e-12
    out = []
    if not (r * (1 - t) <= beta.max() <= 1 + t):
        out.append("max")
    if not (r / kappa_i * (1 - t) <= beta.min() <= r * (1 + t)):
        out.append("min")
    return out
