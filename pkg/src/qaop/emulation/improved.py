"""Emulation of the improved pipeline, which keeps beta in registers.

The iterate lives in a computational-basis register, so one iteration is
reversible arithmetic:

1. forward: ``w_j = (sigma_j^2 beta_j^2 + lambda2) / (sigma_j^2 beta_j)``;
2. amplitude estimation of ``sin(theta) = ||w|| / (c_cap sqrt(k))`` gives
   an estimate ``c_hat`` of the normalization ``c``;
3. the next register is ``w / c_hat``;
4. the old register is uncomputed by solving the quadratic
   ``sigma^2 x^2 - c_hat sigma^2 beta' x + lambda2 = 0`` for ``x``, with a
   stored flag picking the root when the map is not monotone.

Only the last iteration touches amplitudes: a rotation by ``w_j / c_cap``
and post-selection leave the state proportional to ``w``.
"""

import math

import numpy as np

from .._validation import check_choice, check_positive_int, check_real
from ..bounds import c_cap, c_lower, sin_theta
from ..exceptions import BoundViolation, DegenerateIterateError
from ..iteration import BetaState, iterate_spectral, update_weights
from . import ledger as _ledger
from .noise import NoiseConfig, noisy_angle, noisy_eigenvalue
from .result import PipelineResult, fidelity

#: discriminants above ``-DISC_TOL * b^2`` are treated as rounding and clamped
DISC_TOL = 1e-12


def improved_forward(model, beta, lambda2, noise=None, rng=None, sigma_sq=None):
    """Register update ``c^(i) beta^(i)`` from a (noisy) readout of ``beta``.

    Parameters
    ----------
    beta : BetaState or ndarray
        Register contents of the previous iterate.
    sigma_sq : ndarray, optional
        Eigenvalue register; defaults to ``model.sigma_sq`` (a run reads it
        once and passes the noisy copy).

    Returns
    -------
    register : ndarray
        Unnormalized ``w``.
    c_true : float
        ``||w||_2``, the normalization amplitude estimation targets.
    """
    noise = noise or NoiseConfig()
    lambda2 = check_real(lambda2, "lambda2", positive=True)
    b = beta.as_float() if isinstance(beta, BetaState) else np.asarray(beta, dtype=float)
    s2 = model.sigma_sq if sigma_sq is None else np.asarray(sigma_sq, dtype=float)
    if b.shape != (model.k,):
        raise ValueError(f"register has shape {b.shape}, expected ({model.k},)")
    if not noise.is_exact:
        b = noisy_eigenvalue(b, noise.eps1, noise.mode, rng if rng is not None else noise.rng())
    if np.any(b <= 0):
        raise DegenerateIterateError("a beta register entry collapsed to zero")
    w = update_weights(s2, b, lambda2)
    if not np.all(np.isfinite(w)):
        raise FloatingPointError("non-finite register value")
    return w, float(math.sqrt(np.dot(w, w)))


def theta_of(c_i, model, lambda2):
    """``arcsin(c_i / (c_cap sqrt(k)))``."""
    return math.asin(sin_theta(c_i, c_cap(model.k, lambda2, model.kappa), model.k))


def estimate_c(model, c_true, lambda2, noise=None, rng=None):
    """Amplitude-estimation readout of ``c``.

    With no angle noise this returns ``c_true`` unchanged; otherwise
    ``sqrt(k) c_cap sin(theta_hat)`` with ``theta_hat`` from
    :func:`~qaop.emulation.noise.noisy_angle`.
    """
    noise = noise or NoiseConfig()
    theta = theta_of(c_true, model, lambda2)
    if noise.mode == "exact" or noise.eps2 == 0:
        return float(c_true)
    th = noisy_angle(theta, noise.eps2, noise.mode, rng if rng is not None else noise.rng())
    return math.sqrt(model.k) * c_cap(model.k, lambda2, model.kappa) * math.sin(th)


def compute_gamma(sigma_sq, beta_prev, lambda2):
    """Branch flag: True where ``beta_prev >= sqrt(lambda2 / sigma^2)``."""
    s2 = np.asarray(sigma_sq, dtype=float)
    b = np.asarray(beta_prev, dtype=float)
    return b >= np.sqrt(lambda2 / s2)


def quadratic_roots(sigma_sq, beta_next, c_hat, lambda2):
    """Both preimages ``(minus, plus)`` of the scalar update.

    The plus root is evaluated directly and the minus root through the
    product of roots ``lambda2 / sigma^2`` to avoid cancellation.
    """
    s2 = np.asarray(sigma_sq, dtype=float)
    bn = np.asarray(beta_next, dtype=float)
    b = c_hat * s2 * bn
    disc = b * b - 4.0 * s2 * lambda2
    tol = DISC_TOL * b * b
    if np.any(disc < -tol):
        raise ValueError(
            "negative discriminant: (c_hat, beta_next) are inconsistent with sigma^2, lambda2"
        )
    disc = np.maximum(disc, 0.0)
    plus = (b + np.sqrt(disc)) / (2.0 * s2)
    minus = (lambda2 / s2) / plus
    return minus, plus


def quadratic_uncompute(sigma_sq, beta_next, c_hat, lambda2, gamma_flag=None):
    """Recover the previous register from the next one.

    The minus root is always right when ``lambda2 >= 1``: then the critical
    point ``sqrt(lambda2 / sigma^2)`` is at least 1, past every amplitude, so
    the update is monotone. Otherwise ``gamma_flag`` (see
    :func:`compute_gamma`) selects the plus root where set.
    """
    lambda2 = check_real(lambda2, "lambda2", positive=True)
    c_hat = check_real(c_hat, "c_hat", positive=True)
    minus, plus = quadratic_roots(sigma_sq, beta_next, c_hat, lambda2)
    if lambda2 >= 1.0:
        return minus
    if gamma_flag is None:
        raise ValueError("gamma_flag is required when lambda2 < 1")
    g = np.broadcast_to(np.asarray(gamma_flag, dtype=bool), minus.shape)
    return np.where(g, plus, minus)


def p_final_bound(model, lambda2):
    """Lower bound ``(c_lower / c_cap)^2 / k`` on the final success probability."""
    return (c_lower(model.k, lambda2) / c_cap(model.k, lambda2, model.kappa)) ** 2 / model.k


def improved_run(model, lambda2, s, noise=None, ledger="analytic", cost=None,
                 amplification="bound"):
    """Run ``s`` iterations: ``s - 1`` register updates and a final post-selection.

    The eigenvalue register is read once per run; the beta register is read
    with error ``eps1`` at every iteration.

    Returns
    -------
    PipelineResult
        ``p_success_history`` holds the final ``p(1)``. ``diagnostics``
        records ``c``, ``c_hat``, the branch flags and the uncompute
        residuals ``max_j |x_j - beta_j| / beta_j`` per iteration.
    """
    s = check_positive_int(s, "s")
    noise = noise or NoiseConfig()
    cost = cost or _ledger.CostParams()
    lambda2 = check_real(lambda2, "lambda2", positive=True)
    check_choice(ledger, "ledger", ("analytic", "counted"))
    check_choice(amplification, "amplification", ("bound", "observed"))
    rng = noise.rng()
    s2 = model.sigma_sq
    if not noise.is_exact:
        s2 = noisy_eigenvalue(s2, noise.eps1, noise.mode, rng)
    cap = c_cap(model.k, lambda2, model.kappa)
    reg = np.full(model.k, 1.0 / math.sqrt(model.k))
    c_hist, chat_hist, residuals, gammas = [], [], [], []

    for _ in range(1, s):
        b_in = reg if noise.is_exact else noisy_eigenvalue(reg, noise.eps1, noise.mode, rng)
        w, c_true = improved_forward(model, b_in, lambda2, sigma_sq=s2)
        c_hat = estimate_c(model, c_true, lambda2, noise, rng)
        new = w / c_hat
        gamma = compute_gamma(s2, b_in, lambda2)
        back = quadratic_uncompute(s2, new, c_hat, lambda2, gamma)
        residuals.append(float(np.max(np.abs(back - b_in) / b_in)))
        c_hist.append(c_true)
        chat_hist.append(c_hat)
        gammas.append(int(np.count_nonzero(gamma)))
        reg = new

    b_in = reg if noise.is_exact else noisy_eigenvalue(reg, noise.eps1, noise.mode, rng)
    w, c_s = improved_forward(model, b_in, lambda2, sigma_sq=s2)
    amp = w / cap
    if float(np.max(amp)) > 1.0:
        raise BoundViolation(f"final rotation amplitude {float(np.max(amp))!r} exceeds 1")
    p_final = float(np.dot(amp, amp)) / model.k
    c_hist.append(c_s)
    state = BetaState(s, w / c_s, tuple(c_hist))

    if ledger == "analytic":
        led = _ledger.analytic_improved(model.kappa, model.k, s, cost)
    else:
        p = p_final if amplification == "observed" else p_final_bound(model, lambda2)
        led = _ledger.counted_improved(model.kappa, model.k, s, p, cost,
                                       eps2=noise.eps2, eta=noise.eta)
    exact = iterate_spectral(model, lambda2, s)
    return PipelineResult(
        algorithm="improved",
        beta_final=state,
        fidelity=fidelity(exact, state),
        p_success_history=[p_final],
        ledger=led,
        exact=exact,
        diagnostics={
            "c_history": c_hist,
            "c_hat_history": chat_hist,
            "uncompute_residuals": residuals,
            "gamma_plus_count": gammas,
        },
    )


def one_step_error(model, lambda2, noise, beta=None, trials=1):
    """Mean sup-norm relative error of one noisy register update.

    Compares ``w_noisy / c_hat`` against the exact ``w / c`` from ``beta``
    (uniform start by default), averaging over ``trials`` independent noise
    draws from ``noise.seed``.
    """
    trials = check_positive_int(trials, "trials")
    b = np.full(model.k, 1.0 / math.sqrt(model.k)) if beta is None else np.asarray(beta, float)
    w0 = update_weights(model.sigma_sq, b, lambda2)
    exact = w0 / math.sqrt(np.dot(w0, w0))
    rng = noise.rng()
    errs = []
    for _ in range(trials):
        s2 = model.sigma_sq
        b_in = b
        if not noise.is_exact:
            s2 = noisy_eigenvalue(s2, noise.eps1, noise.mode, rng)
            b_in = noisy_eigenvalue(b, noise.eps1, noise.mode, rng)
        w, c_true = improved_forward(model, b_in, lambda2, sigma_sq=s2)
        c_hat = estimate_c(model, c_true, lambda2, noise, rng)
        errs.append(float(np.max(np.abs(w / c_hat - exact) / exact)))
    return float(np.mean(errs))
