"""Scaled data matrix, its SVD, and the spectral model shared by the solvers.

Data matrices follow the column convention: ``X`` is ``n x m`` with one data
point per column. The graph is built over the ``m`` columns, the scaling
factor ``Sigma`` is ``m x m`` and the scaled matrix is ``X @ Sigma``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from ._validation import as_matrix, check_positive_int, check_real
from .exceptions import RankDeficientError

#: squared singular values below this are treated as rank deficiency
MIN_SIGMA_SQ = 1e-14


@dataclass(frozen=True)
class DataSet:
    """Raw AOP input: data columns plus the two regularizers.

    Parameters
    ----------
    X : ndarray of shape (n, m)
        Data matrix, columns are data points.
    lambda1 : float
        Graph regularization weight, ``>= 0``.
    lambda2 : float
        Ridge weight, ``> 0``.
    neighbor_count : int
        Neighbors per point in the kNN graph; must be ``< m``.
    """

    X: np.ndarray
    lambda1: float
    lambda2: float
    neighbor_count: int

    def __post_init__(self):
        X = as_matrix(self.X, "X")
        n, m = X.shape
        if n < 1 or m < 2:
            raise ValueError(f"X needs n >= 1 rows and m >= 2 columns, got {X.shape}")
        check_real(self.lambda1, "lambda1", nonnegative=True)
        check_real(self.lambda2, "lambda2", positive=True)
        check_positive_int(self.neighbor_count, "neighbor_count")
        if self.neighbor_count >= m:
            raise ValueError(
                f"neighbor_count must be < m={m}, got {self.neighbor_count}"
            )
        X.setflags(write=False)
        object.__setattr__(self, "X", X)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def m(self):
        return self.X.shape[1]


@dataclass(frozen=True)
class SpectralModel:
    """The ``k`` retained squared singular values, normalized so the top one is 1.

    ``sigma_sq`` is descending with ``sigma_sq[0] == 1`` and
    ``kappa == 1 / sqrt(sigma_sq[-1])``.
    """

    k: int
    sigma_sq: np.ndarray
    kappa: float

    def __post_init__(self):
        k = check_positive_int(self.k, "k")
        s2 = np.array(self.sigma_sq, dtype=float).ravel()
        if s2.shape != (k,):
            raise ValueError(f"sigma_sq must have length k={k}, got {s2.shape}")
        if not np.all(np.isfinite(s2)):
            raise ValueError("sigma_sq contains non-finite values")
        if abs(s2[0] - 1.0) > 1e-12:
            raise ValueError(f"sigma_sq must be normalized so sigma_sq[0] == 1, got {s2[0]}")
        if np.any(np.diff(s2) > 0):
            raise ValueError("sigma_sq must be nonincreasing")
        if s2[-1] < MIN_SIGMA_SQ:
            raise RankDeficientError(
                f"smallest retained sigma^2 = {s2[-1]:.3e} is below {MIN_SIGMA_SQ:g}"
            )
        kappa = check_real(self.kappa, "kappa", positive=True)
        implied = 1.0 / np.sqrt(s2[-1])
        if kappa < 1.0 or abs(kappa - implied) > 1e-12 * implied:
            raise ValueError(
                f"kappa={kappa!r} inconsistent with sigma_sq (implies {implied!r})"
            )
        s2.setflags(write=False)
        object.__setattr__(self, "sigma_sq", s2)
        object.__setattr__(self, "kappa", kappa)

    @classmethod
    def from_sigma_sq(cls, sigma_sq):
        s2 = np.asarray(sigma_sq, dtype=float).ravel()
        return cls(k=len(s2), sigma_sq=s2, kappa=float(1.0 / np.sqrt(s2[-1])))

    @classmethod
    def from_triplets(cls, triplets, k):
        """Keep the top ``k`` components of an SVD."""
        k = check_positive_int(k, "k")
        if k > triplets.rank:
            raise RankDeficientError(f"k={k} exceeds the numerical rank {triplets.rank}")
        return cls.from_sigma_sq(triplets.singular_values[:k] ** 2)

    @property
    def sigma(self):
        return np.sqrt(self.sigma_sq)


@dataclass(frozen=True)
class SvdTriplets:
    """Thin SVD of the scaled matrix with singular values normalized to ``sigma_0 = 1``.

    ``scale`` is the discarded top singular value, so the original matrix is
    ``scale * left @ diag(singular_values) @ right.T``.
    """

    singular_values: np.ndarray
    left: np.ndarray
    right: np.ndarray
    scale: float

    @property
    def rank(self):
        return len(self.singular_values)

    def reconstruct(self, normalized=False):
        out = (self.left * self.singular_values) @ self.right.T
        return out if normalized else self.scale * out


# -- graph construction ------------------------------------------------------


def knn_weights(X, neighbor_count):
    """Symmetric 0/1 kNN adjacency over the columns of ``X``.

    ``S[i, j] = 1`` iff column ``i`` is among the ``neighbor_count`` nearest
    columns of ``j`` or vice versa. Euclidean distance, a point is never its
    own neighbor, and distance ties go to the lower column index.
    """
    X = as_matrix(X, "X")
    m = X.shape[1]
    if m < 2:
        raise ValueError("need at least two points")
    neighbor_count = check_positive_int(neighbor_count, "neighbor_count")
    if neighbor_count >= m:
        raise ValueError(f"neighbor_count must be < m={m}, got {neighbor_count}")

    # explicit differences: duplicates get an exact 0 so the tie rule applies
    d2 = cdist(X.T, X.T, "sqeuclidean")
    np.fill_diagonal(d2, np.inf)

    order = np.argsort(d2, axis=1, kind="stable")[:, :neighbor_count]
    S = np.zeros((m, m))
    rows = np.repeat(np.arange(m), neighbor_count)
    S[rows, order.ravel()] = 1.0
    S = np.maximum(S, S.T)
    np.fill_diagonal(S, 0.0)
    return S


def graph_laplacian(S):
    """``diag(S 1) - S``."""
    S = as_matrix(S, "S")
    if S.shape[0] != S.shape[1]:
        raise ValueError(f"S must be square, got {S.shape}")
    if not np.array_equal(S, S.T):
        raise ValueError("S must be symmetric")
    if np.any(S < 0):
        raise ValueError("S must be nonnegative")
    return np.diag(S.sum(axis=1)) - S


def sigma_factor(L, lambda1):
    """Symmetric positive definite square root of ``I + lambda1 * L``."""
    L = as_matrix(L, "L")
    lambda1 = check_real(lambda1, "lambda1", nonnegative=True)
    m = L.shape[0]
    if lambda1 == 0.0 or not np.any(L):
        return np.eye(m)
    M = np.eye(m) + lambda1 * L
    M = 0.5 * (M + M.T)
    w, V = np.linalg.eigh(M)
    if w[0] <= 0:
        raise np.linalg.LinAlgError(
            f"I + lambda1*L has a nonpositive eigenvalue {w[0]:.3e}; L is not PSD"
        )
    Sigma = (V * np.sqrt(w)) @ V.T
    return 0.5 * (Sigma + Sigma.T)


def scaled_matrix(X, Sigma):
    X = as_matrix(X, "X")
    Sigma = as_matrix(Sigma, "Sigma")
    if X.shape[1] != Sigma.shape[0]:
        raise ValueError(f"shape mismatch: X {X.shape} vs Sigma {Sigma.shape}")
    Xt = X @ Sigma
    if not np.any(Xt):
        raise ValueError("scaled matrix is identically zero")
    return Xt


def svd(Xt):
    """Thin SVD restricted to the numerical rank, top singular value rescaled to 1."""
    Xt = as_matrix(Xt, "X_tilde")
    if not np.any(Xt):
        raise ValueError("cannot decompose the zero matrix")
    U, s, Vt = np.linalg.svd(Xt, full_matrices=False)
    tol = max(Xt.shape) * np.finfo(float).eps * s[0]
    r = int(np.sum(s > tol))
    scale = float(s[0])
    return SvdTriplets(
        singular_values=s[:r] / scale,
        left=U[:, :r],
        right=Vt[:r].T,
        scale=scale,
    )


def scaled_data(dataset):
    """Build ``X_tilde = X Sigma`` for a :class:`DataSet`."""
    S = knn_weights(dataset.X, dataset.neighbor_count)
    L = graph_laplacian(S)
    return scaled_matrix(dataset.X, sigma_factor(L, dataset.lambda1))


def random_spectrum(k, kappa, seed=None):
    """Random spectrum with pinned endpoints ``1`` and ``1/kappa**2``.

    The ``k - 2`` interior values are i.i.d. uniform on ``(1/kappa**2, 1)``
    and sorted descending. Deterministic for a given seed.
    """
    k = check_positive_int(k, "k", minimum=2)
    kappa = check_real(kappa, "kappa", positive=True)
    if kappa <= 1.0:
        raise ValueError(f"kappa must be > 1, got {kappa}")
    rng = np.random.default_rng(seed)
    low = 1.0 / kappa**2
    interior = np.sort(rng.uniform(low, 1.0, size=k - 2))[::-1]
    sigma_sq = np.concatenate(([1.0], interior, [low]))
    return SpectralModel(k=k, sigma_sq=sigma_sq, kappa=kappa)
