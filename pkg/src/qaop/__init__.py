"""A-optimal projection: classical solver, spectral iteration and quantum pipeline emulation."""

from .classical import ProjectionIterate, objective_trace, objective_ridge, solve_classical
from .estimator import AOptimalProjection
from .iteration import BetaState, beta_init, solve_spectral, spectral_update
from .spectral import DataSet, SpectralModel, SvdTriplets, random_spectrum

__version__ = "0.1.0"

__all__ = [
    "AOptimalProjection", "BetaState", "DataSet", "ProjectionIterate", "SpectralModel",
    "SvdTriplets", "beta_init", "objective_trace", "objective_ridge", "random_spectrum",
    "solve_classical", "solve_spectral", "spectral_update",
]
