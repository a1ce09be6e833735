"""Desk-scale emulation of the DYXL and improved quantum pipelines."""

from .dyxl import dyxl_iteration, dyxl_run, p_success_bound
from .improved import (
    compute_gamma,
    estimate_c,
    improved_forward,
    improved_run,
    one_step_error,
    p_final_bound,
    quadratic_roots,
    quadratic_uncompute,
    theta_of,
)
from .ledger import (
    CostParams,
    CostTable,
    ResourceLedger,
    analytic_dyxl,
    analytic_dyxl_total,
    analytic_improved,
    analytic_improved_total,
    cost_compare,
    counted_dyxl,
    counted_improved,
)
from .noise import NoiseConfig, noisy_angle, noisy_eigenvalue
from .result import PipelineResult, fidelity

__all__ = [
    "CostParams", "CostTable", "NoiseConfig", "PipelineResult", "ResourceLedger",
    "analytic_dyxl", "analytic_dyxl_total", "analytic_improved", "analytic_improved_total",
    "compute_gamma", "cost_compare", "counted_dyxl", "counted_improved", "dyxl_iteration",
    "dyxl_run", "estimate_c", "fidelity", "improved_forward", "improved_run",
    "noisy_angle", "noisy_eigenvalue", "one_step_error", "p_final_bound",
    "p_success_bound", "quadratic_roots", "quadratic_uncompute", "theta_of",
]
