"""Iteration-count sweeps over kappa, eps and k, with trend fits and plots.

Each sweep point draws ``trials_per_point`` random spectra and records how
many iterations the scalar solver needs. Trial ``t`` uses the same spectrum
seed at every grid point (common random numbers), which keeps the trends
smooth at modest trial counts.
"""

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from ._validation import check_choice, check_positive_int
from .iteration import resolve_precision, solve_spectral
from .spectral import random_spectrum

VARIABLES = ("kappa", "eps", "k")
FIXED_DEFAULTS = {"k": 100, "kappa": 10.0, "lambda2": 1.0, "eps": 1e-20, "precision": None}
CSV_COLUMNS = (
    "variable", "value", "family", "family_value", "trial", "seed",
    "s", "kappa_final", "c_final", "converged", "precision_bits",
)


@dataclass(frozen=True)
class SweepSpec:
    """One experiment: vary ``variable`` over ``grid``.

    Parameters
    ----------
    variable : {"kappa", "eps", "k"}
    grid : sequence of numbers, strictly increasing
    fixed : dict
        Values for the other parameters; missing keys fall back to
        ``FIXED_DEFAULTS``. ``precision`` (bits) is optional.
    family : str, optional
        A second parameter giving one curve per value in ``family_values``.
    family_values : sequence, optional
    trials_per_point : int
    seed : int
    max_iter : int
    """

    variable: str
    grid: tuple
    fixed: dict = field(default_factory=dict)
    family: str = None
    family_values: tuple = ()
    trials_per_point: int = 10
    seed: int = 0
    max_iter: int = 10_000_000

    def __post_init__(self):
        check_choice(self.variable, "variable", VARIABLES)
        grid = tuple(float(g) if self.variable != "k" else int(g) for g in self.grid)
        if not grid:
            raise ValueError("grid must be nonempty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        check_positive_int(self.trials_per_point, "trials_per_point")
        check_positive_int(self.max_iter, "max_iter")
        unknown = set(self.fixed) - set(FIXED_DEFAULTS)
        if unknown:
            raise KeyError(f"unknown fixed parameters {sorted(unknown)}")
        if self.family is not None:
            check_choice(self.family, "family", VARIABLES)
            if self.family == self.variable:
                raise ValueError("family must differ from the swept variable")
            if not self.family_values:
                raise ValueError("family_values required with a family")
        object.__setattr__(self, "family_values", tuple(self.family_values))

    def params(self):
        p = dict(FIXED_DEFAULTS)
        p.update(self.fixed)
        return p

    def families(self):
        return list(self.family_values) if self.family else [None]

    def to_dict(self):
        d = asdict(self)
        d["grid"] = list(self.grid)
        d["family_values"] = list(self.family_values)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["grid"] = tuple(d["grid"])
        d["family_values"] = tuple(d.get("family_values", ()))
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        path = Path(path)
        try:
            return cls.from_dict(json.loads(path.read_text()))
        except OSError as exc:
            raise OSError(f"cannot read sweep spec {path}: {exc}") from exc


def trial_seed(master, trial):
    """Deterministic 32-bit seed for trial ``trial`` of a sweep."""
    return int(np.random.SeedSequence([int(master), int(trial)]).generate_state(1)[0])


def _run_trial(task):
    variable, value, family, fvalue, trial, seed, params, max_iter = task
    p = dict(params)
    p[variable] = value
    if family is not None:
        p[family] = fvalue
    k, kappa, eps = int(p["k"]), float(p["kappa"]), float(p["eps"])
    bits = resolve_precision(eps, p["precision"])
    model = random_spectrum(k, kappa, seed)
    sol = solve_spectral(model, float(p["lambda2"]), eps, max_iter=max_iter, precision=bits)
    return {
        "variable": variable,
        "value": value,
        "family": family or "",
        "family_value": fvalue if fvalue is not None else "",
        "trial": trial,
        "seed": seed,
        "s": sol.n_iter,
        "kappa_final": float(sol.trace.kappa[-1]),
        "c_final": float(sol.trace.c[-1]),
        "converged": bool(sol.converged),
        "precision_bits": bits,
    }


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list

    @property
    def any_unconverged(self):
        return any(not r["converged"] for r in self.rows)

    def summary(self):
        """``{(family_value, value): {"mean", "min", "max", "n"}}`` of s."""
        groups = {}
        for r in self.rows:
            groups.setdefault((r["family_value"], r["value"]), []).append(r["s"])
        return {
            key: {"mean": float(np.mean(v)), "min": int(min(v)), "max": int(max(v)), "n": len(v)}
            for key, v in sorted(groups.items(), key=lambda kv: (_key(kv[0][0]), kv[0][1]))
        }

    def curve(self, family_value=None):
        """Grid values and mean s for one family."""
        fv = "" if family_value is None else family_value
        summ = self.summary()
        pts = sorted((val, st["mean"]) for (f, val), st in summ.items() if f == fv)
        if not pts:
            raise KeyError(f"no rows for family value {family_value!r}")
        x, y = zip(*pts)
        return np.array(x, dtype=float), np.array(y)

    def write_csv(self, path):
        path = Path(path)
        try:
            with open(path, "w", newline="") as fh:
                w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
                w.writeheader()
                for r in self.rows:
                    w.writerow({c: _fmt(r[c]) for c in CSV_COLUMNS})
        except OSError as exc:
            raise OSError(f"cannot write sweep CSV {path}: {exc}") from exc
        return path

    def write_json(self, path):
        path = Path(path)
        summ = [
            {"family_value": f, "value": v, **st} for (f, v), st in self.summary().items()
        ]
        doc = {"spec": self.spec.to_dict(), "rows": self.rows, "summary": summ}
        try:
            path.write_text(json.dumps(doc, indent=2))
        except OSError as exc:
            raise OSError(f"cannot write sweep JSON {path}: {exc}") from exc
        return path

    @staticmethod
    def read_csv_rows(path):
        """Parse a CSV written by :meth:`write_csv` back into row dicts."""
        path = Path(path)
        try:
            with open(path, newline="") as fh:
                raw = list(csv.DictReader(fh))
        except OSError as exc:
            raise OSError(f"cannot read sweep CSV {path}: {exc}") from exc
        return [_parse_row(r) for r in raw]


def _key(v):
    return (0, v) if isinstance(v, (int, float)) else (1, str(v))


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return v


def _num(text):
    if text == "":
        return ""
    try:
        return int(text)
    except ValueError:
        return float(text)


def _parse_row(r):
    return {
        "variable": r["variable"],
        "value": _num(r["value"]),
        "family": r["family"],
        "family_value": _num(r["family_value"]),
        "trial": int(r["trial"]),
        "seed": int(r["seed"]),
        "s": int(r["s"]),
        "kappa_final": float(r["kappa_final"]),
        "c_final": float(r["c_final"]),
        "converged": r["converged"] == "true",
        "precision_bits": int(r["precision_bits"]),
    }


def sweep(spec, jobs=1):
    """Run every (family, grid point, trial) of ``spec``.

    Non-converged trials appear as rows with ``converged=False``. Rows come
    back sorted by family value, grid value and trial whatever ``jobs`` is.
    """
    params = spec.params()
    seeds = [trial_seed(spec.seed, t) for t in range(spec.trials_per_point)]
    tasks = [
        (spec.variable, value, spec.family, fv, t, seeds[t], params, spec.max_iter)
        for fv in spec.families()
        for value in spec.grid
        for t in range(spec.trials_per_point)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_run_trial, tasks))
    else:
        rows = [_run_trial(t) for t in tasks]
    rows.sort(key=lambda r: (_key(r["family_value"]), r["value"], r["trial"]))
    return SweepResult(spec, rows)


# -- trend fits --------------------------------------------------------------


@dataclass(frozen=True)
class FitReport:
    form: str
    x: tuple
    y: tuple
    slope: float = math.nan
    intercept: float = math.nan
    r2: float = math.nan
    degenerate: bool = False
    monotone_nondecreasing: bool = True
    divided_differences: tuple = ()
    increasing_differences: bool = None


def fit_trend(result, form="linear", family_value=None, kappa_min=20.0):
    """Summarize the mean-s curve of one family.

    ``linear`` fits mean s against the variable (``log2(1/eps)`` for eps
    sweeps) and reports slope, intercept and R^2; constant data yields
    slope 0 with ``degenerate=True`` and R^2 left as NaN.
    ``superlinear-test`` computes successive divided differences of mean s
    over grid points with ``kappa >= kappa_min`` and reports whether they
    increase strictly.
    """
    check_choice(form, "form", ("linear", "superlinear-test"))
    x, y = result.curve(family_value)
    if len(x) < 3:
        raise ValueError(f"need at least 3 grid points, got {len(x)}")
    if result.spec.variable == "eps":
        x = np.log2(1.0 / x)
        order = np.argsort(x)
        x, y = x[order], y[order]
    mono = bool(np.all(np.diff(y) >= 0))
    if form == "linear":
        if np.ptp(y) == 0:
            return FitReport(form, tuple(x), tuple(y), 0.0, float(y[0]), math.nan, True, mono)
        slope, intercept = np.polyfit(x, y, 1)
        resid = y - (slope * x + intercept)
        r2 = 1.0 - float(np.sum(resid**2) / np.sum((y - y.mean()) ** 2))
        return FitReport(form, tuple(x), tuple(y), float(slope), float(intercept), r2, False, mono)
    if result.spec.variable != "kappa":
        raise ValueError("superlinear-test applies to kappa sweeps")
    sel = x >= kappa_min
    xs, ys = x[sel], y[sel]
    if len(xs) < 3:
        raise ValueError(f"need at least 3 grid points with kappa >= {kappa_min}")
    dd = np.diff(ys) / np.diff(xs)
    return FitReport(form, tuple(x), tuple(y), degenerate=bool(np.ptp(y) == 0),
                     monotone_nondecreasing=mono, divided_differences=tuple(dd),
                     increasing_differences=bool(np.all(np.diff(dd) > 0)))


# -- plotting ----------------------------------------------------------------

_AXIS = {"kappa": r"$\kappa$", "eps": r"$\log_2(1/\epsilon)$", "k": r"$k$"}


def plot_sweep(result, path):
    """Mean s against the swept variable, one curve per family, as an image."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    spec = result.spec
    fig, ax = plt.subplots(figsize=(6, 4))
    for fv in spec.families():
        x, y = result.curve(fv)
        if spec.variable == "eps":
            x = np.log2(1.0 / x)
        label = f"{spec.family}={fv}" if spec.family else None
        ax.plot(x, y, marker="o", label=label)
    ax.set_xlabel(_AXIS[spec.variable])
    ax.set_ylabel("number of iterations $s$")
    if spec.family:
        ax.legend()
    fig.tight_layout()
    path = Path(path)
    try:
        fig.savefig(path, dpi=120)
    except OSError as exc:
        raise OSError(f"cannot write plot {path}: {exc}") from exc
    finally:
        plt.close(fig)
    return path


# -- default experiments -----------------------------------------------------


def default_eps_spec(trials=10, seed=0):
    return SweepSpec("eps", (1e-25, 1e-20, 1e-15, 1e-10), {"k": 100, "kappa": 10.0},
                     trials_per_point=trials, seed=seed)


def default_kappa_spec(trials=10, seed=0):
    return SweepSpec("kappa", (5, 10, 20, 30, 40, 50, 60), {"eps": 1e-20},
                     family="k", family_values=(40, 80, 120, 160),
                     trials_per_point=trials, seed=seed)


def default_k_spec(trials=10, seed=0):
    return SweepSpec("k", (10, 20, 40, 80, 160), {"kappa": 10.0, "eps": 1e-20},
                     trials_per_point=trials, seed=seed)


def write_cost_csv(table, path):
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["s", "dyxl", "improved", "ratio", "crossover"])
            for r in table.rows:
                w.writerow([r["s"], repr(r["dyxl"]), repr(r["improved"]), repr(r["ratio"]),
                            int(r["s"] == table.crossover)])
    except OSError as exc:
        raise OSError(f"cannot write cost CSV {path}: {exc}") from exc
    return path
