"""Common result type of the pipeline emulators."""

from dataclasses import dataclass, field

import numpy as np

from ..iteration import BetaState


def fidelity(beta_a, beta_b):
    """``|<beta_a, beta_b>|`` for two unit vectors, clipped to [0, 1]."""
    a = np.asarray(beta_a.beta if isinstance(beta_a, BetaState) else beta_a, dtype=float)
    b = np.asarray(beta_b.beta if isinstance(beta_b, BetaState) else beta_b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    for name, v in (("beta_a", a), ("beta_b", b)):
        if abs(float(np.dot(v, v)) - 1.0) > 1e-9:
            raise ValueError(f"{name} is not unit norm")
    return float(min(1.0, abs(np.dot(a, b))))


@dataclass
class PipelineResult:
    """Outcome of one emulated pipeline run.

    ``p_success_history`` holds one post-selection probability per iteration
    for DYXL and the single final one for the improved pipeline. ``exact``
    is the noiseless iterate the fidelity refers to. ``diagnostics`` keeps
    per-iteration internals (c values, rho, uncompute residuals, ...).
    """

    algorithm: str
    beta_final: BetaState
    fidelity: float
    p_success_history: list
    ledger: object
    exact: BetaState = None
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "algorithm": self.algorithm,
            "beta_final": self.beta_final.as_float().tolist(),
            "fidelity": self.fidelity,
            "p_success_history": [float(p) for p in self.p_success_history],
            "ledger": self.ledger.to_dict() if self.ledger is not None else None,
            "diagnostics": {k: _plain(v) for k, v in self.diagnostics.items()},
        }


def _plain(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.generic):
        return v.item()
    return v
