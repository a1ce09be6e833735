"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line (visible even
without ``-s``) before asserting. Run just these with ``pytest -m acceptance``.
"""

import math
import time

import numpy as np
import pytest
import sympy as sp

from qaop.bounds import KappaTrace, c_bounds, rotation_factor
from qaop.classical import solve_classical
from qaop.emulation import (
    CostParams,
    NoiseConfig,
    compute_gamma,
    dyxl_run,
    improved_run,
    one_step_error,
    quadratic_uncompute,
)
from qaop.emulation.ledger import analytic_dyxl_total, analytic_improved_total
from qaop.experiments import (
    default_eps_spec,
    default_k_spec,
    default_kappa_spec,
    fit_trend,
    sweep,
)
from qaop.iteration import beta_init, iterate_spectral, solve_spectral, spectral_update
from qaop.spectral import DataSet, random_spectrum

pytestmark = pytest.mark.acceptance

LAMBDAS = (0.25, 1.0, 4.0)


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
        return ok

    return emit


def random_instances(count, seed, k_max=64, kappa_max=32.0):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        k = int(rng.integers(2, k_max + 1))
        kappa = float(rng.uniform(1.01, kappa_max))
        lam = float(rng.choice(LAMBDAS))
        yield random_spectrum(k, kappa, int(rng.integers(2**32))), lam, rng


def test_criterion_1_oracle_equivalence(report):
    rng = np.random.default_rng(101)
    start, worst, steps = time.perf_counter(), 0.0, 0
    for _ in range(50):
        k = int(rng.integers(1, 9))
        n, m = (int(v) for v in rng.integers(max(k, 3), 41, size=2))
        data = DataSet(rng.normal(size=(n, m)), float(rng.uniform(0, 2)),
                       float(rng.choice(LAMBDAS)), int(rng.integers(1, min(5, m - 1) + 1)))
        it = solve_classical(data, k, tol=1e-12, max_iter=300)
        state = beta_init(k)
        for i in range(1, it.iteration + 1):
            state = spectral_update(it.spectrum, state, data.lambda2)
            ref = np.sort(state.beta)
            worst = max(worst, float(np.max(np.abs(it.beta_history[i] - ref) / ref)))
            steps += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 60
    report(1, ok, f"max rel err {worst:.2e} over {steps} iterates, {elapsed:.1f}s")
    assert ok


def test_criterion_2_zero_noise_pipelines(report):
    worst_sup, worst_fid = 0.0, 0.0
    for model, lam, rng in random_instances(1000, 202):
        s = int(rng.integers(1, 31))
        ref = iterate_spectral(model, lam, s).beta
        for run in (dyxl_run, improved_run):
            res = run(model, lam, s)
            worst_sup = max(worst_sup, float(np.max(np.abs(res.beta_final.beta - ref))))
            worst_fid = max(worst_fid, 1 - res.fidelity)
    ok = worst_sup <= 1e-12 and worst_fid <= 1e-12
    report(2, ok, f"sup-norm {worst_sup:.2e}, 1-fidelity {worst_fid:.2e}, 1000 instances")
    assert ok


def test_criterion_3_order_preservation(report):
    violations = 0
    for model, lam, _ in random_instances(1000, 303):
        sol = solve_spectral(model, lam, 1e-10, max_iter=20_000, record=True)
        first = np.argsort(sol.trace.betas[0], kind="stable")
        violations += sum(not np.array_equal(np.argsort(b, kind="stable"), first)
                          for b in sol.trace.betas[1:])
    ok = violations == 0
    report(3, ok, f"{violations} argsort changes over 1000 instances")
    assert ok


def test_criterion_4_kappa_sandwich(report):
    rng = np.random.default_rng(404)
    bad, worst_gap, worst_resid, n = 0, 0.0, 0.0, 0
    while n < 200:
        k = int(rng.integers(2, 65))
        kappa = float(rng.uniform(1.01, 32))
        lam = float(rng.uniform(0.05, 5))
        if lam * kappa <= 1:
            continue
        model = random_spectrum(k, kappa, int(rng.integers(2**32)))
        sol = solve_spectral(model, lam, 1e-10)
        trace = KappaTrace.from_solution(sol, model, lam)
        bad += len(trace.sandwich_violations())
        worst_gap = max(worst_gap, abs(trace.kappa_seq[-1] - model.kappa))
        worst_resid = max(worst_resid, float(np.max(trace.recurrence_residuals(), initial=0)))
        n += 1
    ok = bad == 0 and worst_gap < 1e-6 and worst_resid <= 1e-10
    report(4, ok, f"{bad} violations, |kappa_s - kappa| <= {worst_gap:.1e}, "
                  f"recurrence residual {worst_resid:.1e}")
    assert ok


def test_criterion_5_bounds(report):
    checked, failures = 0, []
    for model, lam, rng in random_instances(300, 505):
        if lam * model.kappa <= 1:
            lam = 4.0
        kappa, k = model.kappa, model.k
        state = beta_init(k)
        for _ in range(int(rng.integers(1, 80))):
            kap_prev = state.kappa
            rho = 1 / (2 * lam * k * kappa**2 * kap_prev)
            if np.max(rho * rotation_factor(model.sigma_sq, state.beta, lam)) > 1 + 1e-12:
                failures.append("rho")
            state = spectral_update(model, state, lam)
            try:
                c_bounds(state, model, lam)
            except AssertionError as exc:
                failures.append(str(exc))
            if state.c**2 < 1 + 2 * k * lam + k * k * lam * lam - 1e-9 * state.c**2:
                failures.append("c lower")
            b = state.beta
            if not (1 / math.sqrt(k) * (1 - 1e-12) <= b.max() <= 1 + 1e-12
                    and 1 / (state.kappa * math.sqrt(k)) * (1 - 1e-12) <= b.min()
                    <= (1 + 1e-12) / math.sqrt(k)):
                failures.append("envelope")
            checked += 1
    ok = not failures
    report(5, ok, f"{len(failures)} violations over {checked} iterates")
    assert ok


def test_criterion_6_probability_scaling(report):
    lam = 1.0
    grid_k, grid_kappa = (4, 16, 64), (2, 4, 8, 16, 32)
    # run constants: the analytic extremes of the two bounds over the k grid
    c_upper = max((1 + lam * math.sqrt(k)) ** 2 / (4 * lam**2 * k) for k in grid_k)
    c_lower = min((1 + k * lam) ** 2 / (k * (1 + lam * math.sqrt(k)) ** 2) for k in grid_k)
    dyxl_vals, imp_vals = [], []
    for kappa in grid_kappa:
        for k in grid_k:
            for seed in range(3):
                model = random_spectrum(k, kappa, seed)
                dyxl_vals += [p * kappa**4 for p in dyxl_run(model, lam, 6).p_success_history]
                for s in (1, 5, 25):
                    imp_vals.append(improved_run(model, lam, s).p_success_history[-1] * kappa**4)
    hi, lo = max(dyxl_vals), min(imp_vals)
    ok = (all(math.isfinite(c) and c > 0 for c in (c_upper, c_lower))
          and all(v <= c_upper + 0.05 * hi for v in dyxl_vals)
          and all(v >= c_lower - 0.05 * lo for v in imp_vals))
    report(6, ok, f"DYXL p1 kappa^4 max {hi:.4f} <= C_upper {c_upper:.4f}; "
                  f"improved p(1) kappa^4 min {lo:.4f} >= C_lower {c_lower:.4f}")
    assert ok


def test_criterion_7_round_trip(report):
    rng = np.random.default_rng(707)
    worst, wrong, branches = 0.0, 0, set()
    for i in range(1000):
        lam = float(rng.uniform(1, 5)) if i % 2 else float(rng.uniform(0.01, 1))
        s2, beta = float(rng.uniform(0.01, 1)), float(rng.uniform(0.01, 1))
        w = beta + lam / (s2 * beta)
        c = w / float(rng.uniform(0.05, 1))
        gamma = compute_gamma(s2, beta, lam)
        if lam < 1:
            branches.add(bool(gamma))
        back = float(quadratic_uncompute(s2, w / c, c, lam, gamma))
        worst = max(worst, abs(back - beta))
        pivot = math.sqrt(lam / s2)
        if (back >= pivot) != (beta >= pivot) and abs(beta - pivot) > 1e-6:
            wrong += 1
    ok = worst <= 1e-10 and wrong == 0 and branches == {True, False}
    report(7, ok, f"max error {worst:.1e}, {wrong} wrong branches, "
                  f"gamma values seen {sorted(branches)}")
    assert ok


def test_criterion_8_error_slopes(report):
    eps = np.logspace(-8, -4, 5)
    slopes, pre = {"eps1": [], "eps2": []}, {"eps1": [], "eps2": []}
    for kappa in (2, 4, 8, 16):
        model = random_spectrum(16, kappa, seed=0)
        for name in ("eps1", "eps2"):
            err = [one_step_error(model, 1.0,
                                  NoiseConfig(mode="stochastic", seed=11, **{name: e}),
                                  trials=200) for e in eps]
            slopes[name].append(np.polyfit(np.log(eps), np.log(err), 1)[0])
            pre[name].append(float(np.exp(np.mean(np.log(err) - np.log(eps)))))
    ok = (all(abs(s - 1) <= 0.1 for v in slopes.values() for s in v)
          and all(np.all(np.diff(v) > 0) for v in pre.values()))
    report(8, ok, "slopes " + ", ".join(f"{n} {min(v):.3f}..{max(v):.3f}"
                                        for n, v in slopes.items())
                  + "; prefactors " + ", ".join(f"{n} " + "/".join(f"{p:.3g}" for p in v)
                                                for n, v in pre.items()))
    assert ok


def test_criterion_9_ledger_laws(report):
    model = random_spectrum(16, 4.0, seed=9)
    dy = [dyxl_run(model, 1.0, s, ledger="counted").ledger.total for s in range(1, 6)]
    ratios = [b / a for a, b in zip(dy, dy[1:])]
    geo_ok = max(ratios) / min(ratios) - 1 <= 0.01

    s = np.arange(1, 51)
    im = np.array([improved_run(model, 1.0, int(i), ledger="counted").ledger.total
                   for i in s], dtype=float)
    fit = np.polyval(np.polyfit(s, im, 2), s)
    quad_resid = float(np.max(np.abs(fit - im) / im))

    kap, k, e, n, m, p, ss = sp.symbols("kappa k eps n m p s", positive=True)
    lg = lambda x: sp.log(x) / sp.log(2)  # noqa: E731
    dyxl_sym = (kap**4 * sp.sqrt(k) / e * lg(m * n / e) ** p) ** ss * lg(1 / e) * lg(n * k)
    imp_sym = (ss * kap**6 * sp.sqrt(k) / e * lg(n * m / e) ** p
               + ss**2 * kap**4 / e * lg(kap * k / e) ** p)
    rng = np.random.default_rng(909)
    worst_sym = 0.0
    for _ in range(50):
        params = CostParams(int(rng.integers(2, 5000)), int(rng.integers(2, 5000)),
                            float(10 ** rng.uniform(-6, -1)), float(rng.uniform(0, 3)))
        vals = (float(rng.uniform(1, 40)), int(rng.integers(1, 300)), int(rng.integers(1, 8)))
        sub = {kap: vals[0], k: vals[1], ss: vals[2], e: params.eps, n: params.n,
               m: params.m, p: params.polylog_exponent}
        for fn, expr in ((analytic_dyxl_total, dyxl_sym), (analytic_improved_total, imp_sym)):
            ref = float(expr.subs(sub).evalf(40))
            worst_sym = max(worst_sym, abs(fn(*vals, params) / ref - 1))
    ok = geo_ok and quad_resid < 0.01 and worst_sym <= 1e-12
    report(9, ok, f"DYXL ratio spread {max(ratios) / min(ratios) - 1:.1e}, "
                  f"improved quadratic residual {quad_resid:.1e}, symbolic {worst_sym:.1e}")
    assert ok


@pytest.mark.slow
def test_criterion_10_iteration_count_sweeps(report):
    details, ok = [], True

    start = time.perf_counter()
    res = sweep(default_eps_spec(trials=10))
    t_eps = time.perf_counter() - start
    r2 = fit_trend(res).r2
    ok &= r2 >= 0.95 and t_eps < 600 and not res.any_unconverged
    details.append(f"eps R^2 {r2:.4f} in {t_eps:.0f}s")

    start = time.perf_counter()
    res = sweep(default_k_spec(trials=10))
    t_k = time.perf_counter() - start
    mono = fit_trend(res).monotone_nondecreasing
    ok &= mono and t_k < 600 and not res.any_unconverged
    details.append(f"k monotone {mono} in {t_k:.0f}s")

    start = time.perf_counter()
    spec = default_kappa_spec(trials=10)
    res = sweep(spec)
    t_kap = time.perf_counter() - start
    inc = [fit_trend(res, "superlinear-test", family_value=fv).increasing_differences
           for fv in spec.family_values]
    ok &= all(inc) and t_kap < 600 and not res.any_unconverged
    details.append(f"kappa increasing differences {sum(inc)}/{len(inc)} families "
                   f"in {t_kap:.0f}s")

    report(10, ok, "; ".join(details))
    assert ok
