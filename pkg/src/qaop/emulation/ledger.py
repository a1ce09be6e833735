"""Resource ledgers for the DYXL and improved pipelines.

Two flavours per pipeline:

analytic
    real-valued closed forms in ``(kappa, k, eps, n, m, s, p)``;
counted
    exact integer bookkeeping of state preparations / circuit calls, driven
    by the repetition counts actually used in an emulated run.

``polylog(x)`` is modeled as ``log2(x) ** p`` with ``p =
CostParams.polylog_exponent`` throughout.

Per-iteration entries are increments: entry ``i`` is the cost added by
iteration ``i``, so ``total == sum(per_iteration_queries)`` in every mode and
``cumulative[i - 1]`` is the cost after ``i`` iterations.
"""

import math
from dataclasses import dataclass, field, asdict

from .._validation import check_positive_int, check_real
from ..exceptions import LedgerCapExceeded

#: counted DYXL ledgers grow like R**s; refuse beyond this many iterations
DYXL_COUNTED_CAP = 6


@dataclass(frozen=True)
class CostParams:
    """Problem-size constants of the cost model.

    ``g0`` overrides the initial state-preparation cost; by default it is
    ``log2(1/eps) * log2(n k)``.
    """

    n: int = 1024
    m: int = 1024
    eps: float = 1e-2
    polylog_exponent: float = 1.0
    g0: float = None

    def __post_init__(self):
        check_positive_int(self.n, "n")
        check_positive_int(self.m, "m")
        eps = check_real(self.eps, "eps", positive=True)
        if eps >= 1:
            raise ValueError(f"eps must be < 1, got {eps}")
        check_real(self.polylog_exponent, "polylog_exponent", nonnegative=True)
        if self.g0 is not None:
            check_real(self.g0, "g0", positive=True)

    def polylog(self, x):
        return math.log2(x) ** self.polylog_exponent

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise KeyError(f"unknown cost parameters {sorted(extra)}")
        return cls(**d)


@dataclass
class ResourceLedger:
    algorithm: str
    mode: str
    per_iteration_queries: list
    total: object
    model_params: dict = field(default_factory=dict)

    @property
    def cumulative(self):
        out, acc = [], 0
        for q in self.per_iteration_queries:
            acc = acc + q
            out.append(acc)
        return out

    def to_dict(self):
        return {
            "algorithm": self.algorithm,
            "mode": self.mode,
            "per_iteration_queries": list(self.per_iteration_queries),
            "total": self.total,
            "model_params": dict(self.model_params),
        }


def _increments(cumulative):
    out, prev = [], 0
    for v in cumulative:
        out.append(v if isinstance(v, float) and math.isinf(v) else v - prev)
        prev = v
    return out


def _params(kappa, k, s, params, **extra):
    d = {"kappa": float(kappa), "k": int(k), "s": int(s), "eps": params.eps,
         "n": params.n, "m": params.m, "p": params.polylog_exponent}
    d.update(extra)
    return d


# -- DYXL --------------------------------------------------------------------


def dyxl_g0(k, params):
    if params.g0 is not None:
        return float(params.g0)
    return math.log2(1.0 / params.eps) * math.log2(params.n * k)


def dyxl_T(kappa, k, params):
    """Per-iteration multiplier ``(kappa^4 sqrt(k) / eps) * polylog(m n / eps)``."""
    return kappa**4 * math.sqrt(k) / params.eps * params.polylog(params.m * params.n / params.eps)


def analytic_dyxl_total(kappa, k, s, params):
    """``T**s * G0``; ``inf`` when it overflows a float."""
    T = dyxl_T(kappa, k, params)
    try:
        return math.pow(T, s) * dyxl_g0(k, params)
    except OverflowError:
        return math.inf


def analytic_dyxl(kappa, k, s, params):
    s = check_positive_int(s, "s")
    cum = [analytic_dyxl_total(kappa, k, i, params) for i in range(1, s + 1)]
    entries = _increments(cum)
    return ResourceLedger(
        "dyxl", "analytic", entries, cum[-1],
        _params(kappa, k, s, params, T=dyxl_T(kappa, k, params), G0=dyxl_g0(k, params)),
    )


def default_eps1(kappa, k, params):
    return params.eps / (kappa**2 * math.sqrt(k))


def dyxl_repetitions(eps1, p_success):
    """``ceil(1/eps1) * ceil(1/sqrt(p))`` copies of the previous state per copy of the next."""
    eps1 = check_real(eps1, "eps1", positive=True)
    p = check_real(p_success, "p_success", positive=True)
    if p > 1 + 1e-12:
        raise ValueError(f"probability must be <= 1, got {p}")
    return math.ceil(1.0 / eps1) * math.ceil(1.0 / math.sqrt(min(p, 1.0)))


def counted_dyxl(kappa, k, s, p_success, params, eps1=None):
    """Initial-state preparations needed for one copy of iterate ``s``.

    ``P(0) = 1`` and ``P(i) = R_i * P(i - 1)`` with ``R_i`` from
    :func:`dyxl_repetitions`. ``p_success`` is a scalar (same for every
    iteration) or a length-``s`` sequence. Counts are exact Python ints.
    """
    s = check_positive_int(s, "s")
    if s > DYXL_COUNTED_CAP:
        raise LedgerCapExceeded(
            f"counted DYXL ledger is capped at s={DYXL_COUNTED_CAP}, got s={s}"
        )
    if eps1 is None or eps1 == 0:
        eps1 = default_eps1(kappa, k, params)
    ps = list(p_success) if hasattr(p_success, "__len__") else [p_success] * s
    if len(ps) != s:
        raise ValueError(f"need {s} success probabilities, got {len(ps)}")
    reps = [dyxl_repetitions(eps1, p) for p in ps]
    cum, acc = [], 1
    for r in reps:
        acc *= r
        cum.append(acc)
    entries = _increments(cum)
    return ResourceLedger(
        "dyxl", "counted", entries, cum[-1],
        _params(kappa, k, s, params, eps1=eps1, repetitions=reps),
    )


# -- improved ----------------------------------------------------------------


def analytic_improved_total(kappa, k, s, params):
    """``s kappa^6 sqrt(k)/eps polylog(nm/eps) + s^2 kappa^4/eps polylog(kappa k/eps)``."""
    e = params.eps
    lin = kappa**6 * math.sqrt(k) / e * params.polylog(params.n * params.m / e)
    quad = kappa**4 / e * params.polylog(kappa * k / e)
    return s * lin + s * s * quad


def analytic_improved(kappa, k, s, params):
    s = check_positive_int(s, "s")
    cum = [analytic_improved_total(kappa, k, i, params) for i in range(1, s + 1)]
    return ResourceLedger("improved", "analytic", _increments(cum), cum[-1],
                          _params(kappa, k, s, params))


def default_eps2(kappa, params):
    return params.eps / kappa**2


def estimation_calls(eps2, eta):
    """``ceil(ceil(1/eps2) * (2 + 1/(2 eta)))`` circuit calls per estimate of c."""
    eps2 = check_real(eps2, "eps2", positive=True)
    eta = check_real(eta, "eta", positive=True)
    return math.ceil(math.ceil(1.0 / eps2) * (2.0 + 1.0 / (2.0 * eta)))


def counted_improved(kappa, k, s, p_final, params, eps2=None, eta=0.25):
    """Integer cost of the improved pipeline, quadratic in ``s``.

    Units are elementary state preparations / arithmetic blocks:

    * ``G_0 = ceil(kappa^2 sqrt(k)/eps * polylog(nm/eps))`` prepares the
      initial registers;
    * each register update adds forward and uncompute arithmetic,
      ``G_i = G_{i-1} + 2 * ceil(polylog(kappa k / eps))``;
    * iteration ``i < s`` spends ``M * G_{i-1}`` on amplitude estimation of
      ``c^(i)``, with ``M`` from :func:`estimation_calls`;
    * the final rotation is repeated ``ceil(1/sqrt(p_final))`` times, each
      costing ``2 (G_{s-1} + poly)`` for compute plus uncompute.
    """
    s = check_positive_int(s, "s")
    if eps2 is None or eps2 == 0:
        eps2 = default_eps2(kappa, params)
    p_final = check_real(p_final, "p_final", positive=True)
    e = params.eps
    g0 = math.ceil(kappa**2 * math.sqrt(k) / e * params.polylog(params.n * params.m / e))
    poly = math.ceil(params.polylog(kappa * k / e))
    M = estimation_calls(eps2, eta)
    reps = math.ceil(1.0 / math.sqrt(min(p_final, 1.0)))
    G = g0
    entries = []
    for _ in range(1, s):
        entries.append(M * G)
        G += 2 * poly
    entries.append(reps * 2 * (G + poly))
    return ResourceLedger(
        "improved", "counted", entries, sum(entries),
        _params(kappa, k, s, params, eps2=eps2, eta=eta, G0=g0, poly=poly,
                estimation_calls=M, final_repetitions=reps),
    )


# -- comparison --------------------------------------------------------------


@dataclass(frozen=True)
class CostTable:
    rows: list
    crossover: object  # first s where improved < dyxl, else None

    def to_dict(self):
        return {"rows": list(self.rows), "crossover": self.crossover}


def cost_compare(params, s_range, kappa, k):
    """Analytic DYXL versus improved totals over ``s_range``."""
    rows = []
    crossover = None
    for s in s_range:
        s = check_positive_int(int(s), "s")
        d = analytic_dyxl_total(kappa, k, s, params)
        im = analytic_improved_total(kappa, k, s, params)
        rows.append({"s": s, "dyxl": d, "improved": im, "ratio": _safe_ratio(d, im)})
        if crossover is None and im < d:
            crossover = s
    return CostTable(rows, crossover)


def _safe_ratio(a, b):
    if math.isinf(a):
        return math.inf
    return a / b
