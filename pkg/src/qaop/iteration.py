"""Scalar iteration on the singular values of the projection.

In the basis of the left singular vectors of the scaled data, the projection
iterate is diagonal, and one alternating step reduces to

    w_j = (sigma_j^2 beta_j^2 + lambda2) / (sigma_j^2 beta_j),
    c = ||w||_2,  beta' = w / c.

:func:`solve_spectral` runs that map to a fixed point in a selectable
arithmetic: float64, double-double (106 bits) or gmpy2 ``mpfr`` at any
precision. Extended precision matters because stopping thresholds far below
float64 resolution (1e-20 and smaller) are part of the iteration-count
studies.
"""

import math
import os
from dataclasses import dataclass
from typing import NamedTuple

import gmpy2
import numpy as np

from . import _kernels
from ._validation import check_positive_int, check_real
from .exceptions import DegenerateIterateError

#: environment variable overriding the default working precision (bits)
PRECISION_ENV = "QAOP_PRECISION"

DOUBLE_BITS = 53
DD_BITS = 106
_CHUNK = 1 << 16


@dataclass(frozen=True)
class BetaState:
    """Unit-norm singular-value vector of the projection after ``iteration`` steps.

    ``beta`` is a float64 array, or an object array of ``gmpy2.mpfr`` for
    multiprecision runs. ``c_history`` lists the normalization constants
    ``c^(1) .. c^(iteration)``.
    """

    iteration: int
    beta: np.ndarray
    c_history: tuple = ()

    def __post_init__(self):
        beta = np.asarray(self.beta)
        if beta.dtype != object:
            beta = beta.astype(float)
        if beta.ndim != 1 or beta.size == 0:
            raise ValueError(f"beta must be a nonempty vector, got shape {beta.shape}")
        as_float = beta.astype(float)
        if np.any(as_float <= 0) or np.any(as_float > 1 + 1e-12):
            raise ValueError("beta entries must lie in (0, 1]")
        norm = float(np.sum(as_float * as_float))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"beta must have unit norm, got sum(beta^2) = {norm!r}")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "c_history", tuple(self.c_history))

    @property
    def k(self):
        return self.beta.size

    @property
    def kappa(self):
        """Condition number ``max beta / min beta`` of the iterate."""
        return float(max(self.beta) / min(self.beta))

    @property
    def a(self):
        """Largest squared amplitude."""
        return float(max(self.beta)) ** 2

    @property
    def c(self):
        return self.c_history[-1] if self.c_history else None

    def as_float(self):
        return self.beta.astype(float)


def beta_init(k):
    """Uniform start ``beta_j = 1/sqrt(k)``."""
    k = check_positive_int(k, "k")
    return BetaState(iteration=0, beta=np.full(k, 1.0 / math.sqrt(k)))


def update_weights(sigma_sq, beta, lambda2):
    """Unnormalized update ``(sigma^2 beta^2 + lambda2) / (sigma^2 beta)``."""
    sb = sigma_sq * beta
    return (sb * beta + lambda2) / sb


def _norm(w):
    if w.dtype == object:
        return gmpy2.sqrt(sum(x * x for x in w))
    return float(np.sqrt(np.dot(w, w)))


def spectral_update(model, state, lambda2):
    """One step of the scalar iteration; ``c`` is appended to the history."""
    lambda2 = check_real(lambda2, "lambda2", positive=True)
    if state.k != model.k:
        raise ValueError(f"state has k={state.k}, model has k={model.k}")
    beta = state.beta
    if np.any(beta.astype(float) <= 0):
        raise DegenerateIterateError("beta has a nonpositive entry")
    if beta.dtype == object:
        s2 = np.array([gmpy2.mpfr(x) for x in model.sigma_sq], dtype=object)
        w = update_weights(s2, beta, gmpy2.mpfr(lambda2))
    else:
        w = update_weights(model.sigma_sq, beta, lambda2)
    c = _norm(w)
    return BetaState(state.iteration + 1, w / c, state.c_history + (c,))


def iterate_spectral(model, lambda2, s):
    """The exact iterate after ``s`` steps from the uniform start (float64)."""
    state = beta_init(model.k)
    for _ in range(s):
        state = spectral_update(model, state, lambda2)
    return state


# -- precision ---------------------------------------------------------------


def resolve_precision(eps, precision=None):
    """Working precision in bits for a stopping threshold ``eps``.

    An explicit ``precision`` wins, then the ``QAOP_PRECISION`` environment
    variable. Otherwise float64 for ``eps >= 1e-12`` and, below that, the
    smallest backend whose unit roundoff sits at least 2**-20 under ``eps``:
    double-double up to 106 bits, multiprecision beyond.
    """
    if precision is None:
        env = os.environ.get(PRECISION_ENV)
        if env:
            precision = int(env)
    if precision is not None:
        return check_positive_int(int(precision), "precision", minimum=2)
    if eps >= 1e-12:
        return DOUBLE_BITS
    needed = math.ceil(math.log2(1.0 / eps)) + 20
    return DD_BITS if needed <= DD_BITS else needed + 24


def backend_for(bits):
    if bits <= DOUBLE_BITS:
        return "double"
    if bits <= DD_BITS:
        return "double-double"
    return "mpfr"


# -- solver ------------------------------------------------------------------


class SpectralTrace(NamedTuple):
    """Per-iteration diagnostics, index ``i - 1`` for iteration ``i``."""

    c: np.ndarray
    kappa: np.ndarray
    a: np.ndarray
    inversions: np.ndarray
    betas: list  # empty unless recorded


class SpectralSolution(NamedTuple):
    state: BetaState
    n_iter: int
    converged: bool
    precision: int
    trace: SpectralTrace


def solve_spectral(model, lambda2, eps, max_iter=10_000_000, precision=None, record=False):
    """Iterate until the sup-norm change of beta falls below ``eps``.

    Parameters
    ----------
    model : SpectralModel
    lambda2 : float
    eps : float
        Stopping threshold on ``max_j |beta_j^(i) - beta_j^(i-1)|``.
    max_iter : int
    precision : int, optional
        Bits of working precision; see :func:`resolve_precision`.
    record : bool
        Keep every iterate in ``trace.betas`` (as float64 arrays).

    Returns
    -------
    SpectralSolution
        ``n_iter`` is the count ``s`` of the first iteration meeting the
        threshold. Non-convergence is reported via ``converged=False`` with
        the last iterate.
    """
    lambda2 = check_real(lambda2, "lambda2", positive=True)
    eps = check_real(eps, "eps", positive=True)
    max_iter = check_positive_int(max_iter, "max_iter")
    bits = resolve_precision(eps, precision)
    backend = backend_for(bits)
    if backend == "mpfr":
        return _solve_mpfr(model, lambda2, eps, max_iter, bits, record)

    k = model.k
    s2 = np.ascontiguousarray(model.sigma_sq, dtype=float)
    hi = np.full(k, 1.0 / math.sqrt(k))
    if backend == "double-double":
        lo = np.zeros(k)
        # the low word of 1/sqrt(k), so the start is uniform to ~1e-32
        root = gmpy2.mpfr(1, 120) / gmpy2.sqrt(gmpy2.mpfr(k, 120))
        lo[:] = float(root - gmpy2.mpfr(hi[0], 120))

    chunks = {"c": [], "kappa": [], "a": [], "inv": []}
    betas = []
    done = 0
    converged = False
    while done < max_iter and not converged:
        n = min(_CHUNK, max_iter - done)
        hist = np.empty((n if record else 0, k))
        if backend == "double":
            steps, converged, c, kap, a, inv = _kernels.run_double(s2, hi, lambda2, eps, n, hist)
        else:
            steps, converged, c, kap, a, inv = _kernels.run_dd(s2, hi, lo, lambda2, eps, n, hist)
        chunks["c"].append(c[:steps].copy())
        chunks["kappa"].append(kap[:steps].copy())
        chunks["a"].append(a[:steps].copy())
        chunks["inv"].append(inv[:steps].copy())
        if record:
            betas.extend(hist[:steps].copy())
        done += steps

    trace = SpectralTrace(
        c=np.concatenate(chunks["c"]),
        kappa=np.concatenate(chunks["kappa"]),
        a=np.concatenate(chunks["a"]),
        inversions=np.concatenate(chunks["inv"]),
        betas=betas,
    )
    beta = hi.copy()
    if backend == "double-double":
        beta = hi + lo
    # renormalize the float64 rounding; sub-ulp for the dd case
    beta = beta / np.sqrt(np.dot(beta, beta))
    state = BetaState(done, beta, tuple(trace.c.tolist()))
    return SpectralSolution(state, done, bool(converged), bits, trace)


def _solve_mpfr(model, lambda2, eps, max_iter, bits, record):
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        k = model.k
        s2 = [gmpy2.mpfr(float(x)) for x in model.sigma_sq]
        lam = gmpy2.mpfr(lambda2)
        beta = [1 / gmpy2.sqrt(gmpy2.mpfr(k))] * k
        thr = gmpy2.mpfr(eps)
        cs, kaps, As, invs, betas = [], [], [], [], []
        converged = False
        it = 0
        while it < max_iter:
            it += 1
            w = [b + lam / (s * b) for s, b in zip(s2, beta)]
            c = gmpy2.sqrt(sum(x * x for x in w))
            new = [x / c for x in w]
            diff = max(abs(x - y) for x, y in zip(new, beta))
            beta = new
            bmax, bmin = max(beta), min(beta)
            cs.append(c)
            kaps.append(float(bmax / bmin))
            As.append(float(bmax * bmax))
            invs.append(sum(1 for j in range(k - 1) if beta[j + 1] < beta[j]))
            if record:
                betas.append(np.array([float(x) for x in beta]))
            if diff < thr:
                converged = True
                break
        arr = np.empty(k, dtype=object)
        arr[:] = beta
        trace = SpectralTrace(
            c=np.array([float(x) for x in cs]),
            kappa=np.array(kaps),
            a=np.array(As),
            inversions=np.array(invs, dtype=np.int64),
            betas=betas,
        )
        state = BetaState(it, arr, tuple(cs))
    return SpectralSolution(state, it, converged, bits, trace)
