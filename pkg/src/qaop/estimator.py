"""scikit-learn front end for the classical A-optimal projection solver."""

import warnings

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import ConvergenceWarning
from sklearn.utils.validation import check_is_fitted, validate_data

from .classical import solve_classical
from .spectral import DataSet


class AOptimalProjection(TransformerMixin, BaseEstimator):
    """Graph-regularized A-optimal projection.

    Learns ``n_components`` directions ``A`` minimizing
    ``Tr[(A^T X~ X~^T A + lambda2 I)^-1]`` where ``X~`` is the data scaled by
    the square root of ``I + lambda1 L`` and ``L`` is the Laplacian of the
    kNN graph over the samples.

    Parameters
    ----------
    n_components : int, default=2
        Target dimension ``k``.
    lambda1 : float, default=1.0
        Graph regularization weight.
    lambda2 : float, default=1.0
        Ridge weight.
    n_neighbors : int, default=5
        Neighbors per sample in the kNN graph (clipped to ``n_samples - 1``).
    tol : float, default=1e-10
        Stop once the singular values of ``A`` move less than ``tol``.
    max_iter : int, default=1000
    normalize : bool, default=True
        Rescale the scaled data to unit top singular value before solving.

    Attributes
    ----------
    components_ : ndarray of shape (n_components, n_features)
        Rows are the projection directions (``A.T``).
    beta_ : ndarray of shape (n_components,)
        Singular values of ``A``, ascending.
    n_iter_ : int
    converged_ : bool
    objective_history_ : list of float
        Ridge objective per iteration.
    spectrum_ : SpectralModel
        Retained normalized squared singular values of the scaled data.
    scale_ : float
        Top singular value removed by normalization.
    n_features_in_ : int

    Examples
    --------
    >>> import numpy as np
    >>> from qaop import AOptimalProjection
    >>> X = np.random.default_rng(0).normal(size=(30, 5))
    >>> Z = AOptimalProjection(n_components=2).fit_transform(X)
    >>> Z.shape
    (30, 2)
    """

    def __init__(self, n_components=2, lambda1=1.0, lambda2=1.0, n_neighbors=5,
                 tol=1e-10, max_iter=1000, normalize=True):
        self.n_components = n_components
        self.lambda1 = lambda1
        self.lambda2 = lambda2
        self.n_neighbors = n_neighbors
        self.tol = tol
        self.max_iter = max_iter
        self.normalize = normalize

    def fit(self, X, y=None):
        X = validate_data(self, X, dtype=np.float64, ensure_min_samples=2)
        n_samples, n_features = X.shape
        k = self.n_components
        if not isinstance(k, (int, np.integer)) or k < 1:
            raise ValueError(f"n_components must be a positive integer, got {k!r}")
        if k > min(n_samples, n_features):
            raise ValueError(
                f"n_components={k} must be <= min(n_samples, n_features)="
                f"{min(n_samples, n_features)}"
            )
        data = DataSet(
            X=X.T,
            lambda1=self.lambda1,
            lambda2=self.lambda2,
            neighbor_count=min(self.n_neighbors, n_samples - 1),
        )
        it = solve_classical(data, k, tol=self.tol, max_iter=self.max_iter,
                             normalize=self.normalize)
        if not it.converged:
            warnings.warn(
                f"AOptimalProjection did not converge in {self.max_iter} iterations",
                ConvergenceWarning,
            )
        self.components_ = it.A.T
        self.beta_ = it.beta
        self.n_iter_ = it.iteration
        self.converged_ = it.converged
        self.objective_history_ = list(it.objective_history)
        self.spectrum_ = it.spectrum
        self.scale_ = it.scale
        return self

    def transform(self, X):
        check_is_fitted(self)
        X = validate_data(self, X, dtype=np.float64, reset=False)
        return X @ self.components_.T
