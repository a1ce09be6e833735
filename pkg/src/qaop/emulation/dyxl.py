"""Emulation of the DYXL pipeline on the amplitudes beta.

Each iteration reads ``sigma_j^2`` and ``beta_j^2`` by phase estimation,
rotates an ancilla by ``rho * f(sigma_j, beta_j)`` and post-selects the
ancilla on 1. On the amplitudes that is

    beta_j  ->  beta_j * rho * f_j / sqrt(p1),   p1 = sum_j (beta_j rho f_j)^2,

which for exact eigenvalues is the scalar update ``w / ||w||``. The state
request for iteration ``i`` consumes many copies of iterate ``i - 1``, which
is what makes the counted ledger exponential in ``s``.
"""

import math

import numpy as np

from .._validation import check_choice, check_positive_int, check_real
from ..bounds import c_lower, rho_param
from ..exceptions import BoundViolation
from ..iteration import BetaState, iterate_spectral
from . import ledger as _ledger
from .noise import NoiseConfig, noisy_eigenvalue
from .result import PipelineResult, fidelity

RHO_POLICIES = ("worst-case", "adaptive")


def _kappa_iter(model, state, rho_policy):
    if rho_policy == "worst-case":
        # every iterate has kappa^(i) <= kappa^2
        return model.kappa**2
    return max(1.0, state.kappa)


def dyxl_iteration(model, state, lambda2, noise=None, rng=None, rho_policy="worst-case"):
    """One DYXL iteration.

    Parameters
    ----------
    model : SpectralModel
    state : BetaState
    lambda2 : float
    noise : NoiseConfig, optional
    rng : numpy.random.Generator, optional
        Stream for stochastic noise; a fresh one from ``noise.seed`` if omitted.
    rho_policy : {"worst-case", "adaptive"}
        ``rho`` is sized for ``kappa_iter = kappa^2`` (valid for every
        iterate) or for the condition number of the current state.

    Returns
    -------
    state : BetaState
        The post-selected iterate; its last ``c`` is ``sqrt(p1) / rho``.
    p1 : float
        Probability of reading 1 on the ancilla.

    Raises
    ------
    BoundViolation
        If some rotation amplitude ``rho * f`` exceeds 1.
    """
    noise = noise or NoiseConfig()
    check_choice(rho_policy, "rho_policy", RHO_POLICIES)
    lambda2 = check_real(lambda2, "lambda2", positive=True)
    if state.k != model.k:
        raise ValueError(f"state has k={state.k}, model has k={model.k}")
    if rng is None:
        rng = noise.rng()
    beta = state.as_float()
    s2 = model.sigma_sq
    b2 = beta * beta
    if not noise.is_exact:
        s2 = noisy_eigenvalue(s2, noise.eps1, noise.mode, rng)
        b2 = noisy_eigenvalue(b2, noise.eps1, noise.mode, rng)
    rho = rho_param(model, lambda2, _kappa_iter(model, state, rho_policy))
    sb2 = s2 * b2
    amp = rho * ((sb2 + lambda2) / sb2)
    worst = float(np.max(amp))
    if worst > 1.0:
        raise BoundViolation(f"rotation amplitude rho*f = {worst!r} exceeds 1")
    unnorm = beta * amp
    p1 = float(np.dot(unnorm, unnorm))
    if not (np.isfinite(p1) and p1 > 0):
        raise FloatingPointError(f"post-selection probability is {p1!r}")
    root = math.sqrt(p1)
    new = BetaState(state.iteration + 1, unnorm / root, state.c_history + (root / rho,))
    return new, p1


def p_success_bound(model, lambda2):
    """Lower bound ``(rho c_lower)^2`` on every worst-case-policy ``p1``."""
    rho = rho_param(model, lambda2, model.kappa**2)
    return (rho * c_lower(model.k, lambda2)) ** 2


def dyxl_run(model, lambda2, s, noise=None, ledger="analytic", cost=None,
             rho_policy="worst-case", amplification="bound"):
    """Chain ``s`` DYXL iterations from the uniform start.

    Parameters
    ----------
    ledger : {"analytic", "counted"}
    cost : CostParams, optional
    amplification : {"bound", "observed"}
        Counted mode only. The repetition count per iteration uses either the
        analytic lower bound on ``p1`` (constant across iterations) or the
        probability measured in the run.

    Raises
    ------
    LedgerCapExceeded
        Counted mode with ``s`` above the recursion cap; checked before any
        work is done.
    """
    s = check_positive_int(s, "s")
    noise = noise or NoiseConfig()
    cost = cost or _ledger.CostParams()
    check_choice(ledger, "ledger", ("analytic", "counted"))
    check_choice(amplification, "amplification", ("bound", "observed"))
    if ledger == "counted" and s > _ledger.DYXL_COUNTED_CAP:
        raise _ledger.LedgerCapExceeded(
            f"counted DYXL ledger is capped at s={_ledger.DYXL_COUNTED_CAP}, got s={s}"
        )
    rng = noise.rng()
    state = BetaState(0, np.full(model.k, 1.0 / math.sqrt(model.k)))
    probs = []
    for _ in range(s):
        state, p1 = dyxl_iteration(model, state, lambda2, noise, rng, rho_policy)
        probs.append(p1)

    if ledger == "analytic":
        led = _ledger.analytic_dyxl(model.kappa, model.k, s, cost)
    else:
        ps = probs if amplification == "observed" else p_success_bound(model, lambda2)
        led = _ledger.counted_dyxl(model.kappa, model.k, s, ps, cost, eps1=noise.eps1)
    exact = iterate_spectral(model, lambda2, s)
    return PipelineResult(
        algorithm="dyxl",
        beta_final=state,
        fidelity=fidelity(exact, state),
        p_success_history=probs,
        ledger=led,
        exact=exact,
        diagnostics={"c_history": list(state.c_history), "rho_policy": rho_policy},
    )
