"""Matrix-space A-optimal projection by alternating B / A updates.

This is the dense reference solver. Given the scaled data ``Xt`` (``n x m``)
it alternates

* ``B = (Xt^T A A^T Xt + lambda2 I)^{-1} Xt^T A``
* ``A = pinv(Xt B B^T Xt^T) Xt B``, then ``A /= ||A||_F``

starting from the top-``k`` left singular vectors scaled by ``1/sqrt(k)``.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import as_matrix, check_positive_int, check_real
from .exceptions import DegenerateIterateError, RankDeficientError
from .spectral import SpectralModel, scaled_data, svd

#: relative cutoff for the pseudoinverse in the A update
PINV_RCOND = 1e-12


@dataclass
class ProjectionIterate:
    """State of the classical solver.

    ``beta_history[i]`` holds the singular values of ``A`` after iteration
    ``i`` (index 0 is the PCA start), sorted ascending.
    """

    A: np.ndarray
    B: np.ndarray
    iteration: int
    objective_history: list = field(default_factory=list)
    objective_trace_history: list = field(default_factory=list)
    beta_history: list = field(default_factory=list)
    converged: bool = False
    spectrum: SpectralModel = None
    scale: float = 1.0

    @property
    def beta(self):
        return self.beta_history[-1]


def objective_trace(A, Xt, lambda2):
    """``Tr[(A^T Xt Xt^T A + lambda2 I)^{-1}]``."""
    A = as_matrix(A, "A")
    Xt = as_matrix(Xt, "Xt")
    lambda2 = check_real(lambda2, "lambda2", positive=True)
    G = A.T @ Xt
    M = G @ G.T + lambda2 * np.eye(A.shape[1])
    return float(np.trace(np.linalg.inv(M)))


def objective_ridge(A, B, Xt, lambda2):
    """``||I - A^T Xt B||_F^2 + lambda2 ||B||_F^2``."""
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    Xt = as_matrix(Xt, "Xt")
    R = np.eye(A.shape[1]) - A.T @ Xt @ B
    return float(np.sum(R * R) + lambda2 * np.sum(B * B))


def pca_init(Xt, k):
    """Top-``k`` left singular vectors as columns, scaled to unit Frobenius norm."""
    Xt = as_matrix(Xt, "Xt")
    k = check_positive_int(k, "k")
    trip = svd(Xt)
    if trip.rank < k:
        raise RankDeficientError(f"rank {trip.rank} < k={k}")
    return trip.left[:, :k] / np.sqrt(k)


def update_B(A, Xt, lambda2):
    A = as_matrix(A, "A")
    Xt = as_matrix(Xt, "Xt")
    lambda2 = check_real(lambda2, "lambda2", positive=True)
    XtA = Xt.T @ A
    M = XtA @ XtA.T + lambda2 * np.eye(Xt.shape[1])
    return np.linalg.solve(M, XtA)


def update_A(B, Xt, normalize=True):
    """A update through the Moore-Penrose pseudoinverse.

    ``Xt B B^T Xt^T`` is ``n x n`` with rank at most ``k``, so the plain
    inverse does not exist once ``k < n``.
    """
    B = as_matrix(B, "B")
    Xt = as_matrix(Xt, "Xt")
    XB = Xt @ B
    if not np.any(XB):
        raise DegenerateIterateError("Xt @ B vanished; the iterate is degenerate")
    P = np.linalg.pinv(XB @ XB.T, rcond=PINV_RCOND, hermitian=True)
    A = P @ XB
    if normalize:
        A = A / np.linalg.norm(A)
    return A


def singular_values(A):
    return np.sort(np.linalg.svd(A, compute_uv=False))


def solve_classical(dataset, k, tol=1e-10, max_iter=1000, normalize=True):
    """Run the alternating solver on a :class:`~qaop.spectral.DataSet`.

    Parameters
    ----------
    dataset : DataSet
    k : int
        Target dimension.
    tol : float
        Stop once the sup-norm change of A's singular values drops below it.
    max_iter : int
    normalize : bool
        Rescale ``Xt`` so its top singular value is 1, which makes the
        iterates comparable with the spectral solver. The discarded scale is
        kept on the result.

    Returns
    -------
    ProjectionIterate
        ``converged`` is False when ``max_iter`` ran out; no exception.
    """
    k = check_positive_int(k, "k")
    tol = check_real(tol, "tol", positive=True)
    max_iter = check_positive_int(max_iter, "max_iter")
    Xt = scaled_data(dataset)
    trip = svd(Xt)
    spectrum = SpectralModel.from_triplets(trip, k)
    if normalize:
        Xt = Xt / trip.scale
    return iterate(Xt, k, dataset.lambda2, tol, max_iter, spectrum=spectrum, scale=trip.scale)


def iterate(Xt, k, lambda2, tol=1e-10, max_iter=1000, spectrum=None, scale=1.0):
    """The alternating loop on an already scaled matrix."""
    A = pca_init(Xt, k)
    beta = singular_values(A)
    state = ProjectionIterate(
        A=A, B=np.zeros((Xt.shape[1], k)), iteration=0,
        beta_history=[beta], spectrum=spectrum, scale=scale,
    )
    for i in range(1, max_iter + 1):
        B = update_B(state.A, Xt, lambda2)
        A = update_A(B, Xt)
        new_beta = singular_values(A)
        ridge = objective_ridge(A, B, Xt, lambda2)
        trace = objective_trace(A, Xt, lambda2)
        if not (np.isfinite(ridge) and np.isfinite(trace)):
            raise FloatingPointError(f"objective became non-finite at iteration {i}")
        state.A, state.B, state.iteration = A, B, i
        state.objective_history.append(ridge)
        state.objective_trace_history.append(trace)
        state.beta_history.append(new_beta)
        if np.max(np.abs(new_beta - beta)) < tol:
            state.converged = True
            break
        beta = new_beta
    return state
