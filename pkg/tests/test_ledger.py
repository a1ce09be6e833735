import math

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from qaop.emulation.ledger import (
    DYXL_COUNTED_CAP,
    CostParams,
    analytic_dyxl,
    analytic_dyxl_total,
    analytic_improved,
    analytic_improved_total,
    cost_compare,
    counted_dyxl,
    counted_improved,
    dyxl_g0,
    dyxl_repetitions,
    dyxl_T,
    estimation_calls,
)
from qaop.exceptions import LedgerCapExceeded

params_st = st.builds(CostParams, st.integers(2, 4096), st.integers(2, 4096),
                      st.floats(1e-6, 0.5), st.floats(0, 3))


def _symbolic():
    kap, k, e, n, m, p, s = sp.symbols("kappa k eps n m p s", positive=True)
    pl = lambda x: (sp.log(x) / sp.log(2)) ** p  # noqa: E731
    T = kap**4 * sp.sqrt(k) / e * pl(m * n / e)
    # the initial preparation uses plain log2 factors
    dyxl = T**s * (sp.log(1 / e) / sp.log(2)) * (sp.log(n * k) / sp.log(2))
    imp = s * kap**6 * sp.sqrt(k) / e * pl(n * m / e) + s**2 * kap**4 / e * pl(kap * k / e)
    return (kap, k, e, n, m, p, s), dyxl, imp


class TestClosedForms:
    @given(params_st, st.floats(1, 50), st.integers(1, 256), st.integers(1, 6))
    def test_against_symbolic(self, params, kappa, k, s):
        syms, dyxl, imp = _symbolic()
        vals = dict(zip(syms, (kappa, k, params.eps, params.n, params.m,
                               params.polylog_exponent, s)))
        ref_d = float(dyxl.subs(vals).evalf(30))
        ref_i = float(imp.subs(vals).evalf(30))
        assert analytic_dyxl_total(kappa, k, s, params) == pytest.approx(ref_d, rel=1e-10)
        assert analytic_improved_total(kappa, k, s, params) == pytest.approx(ref_i, rel=1e-10)

    def test_single_iteration_dyxl(self):
        p = CostParams()
        assert analytic_dyxl_total(10, 100, 1, p) == pytest.approx(
            dyxl_T(10, 100, p) * dyxl_g0(100, p), rel=1e-15)

    def test_g0_override(self):
        p = CostParams(g0=7.0)
        assert analytic_dyxl_total(2, 4, 1, p) == pytest.approx(7.0 * dyxl_T(2, 4, p))

    def test_overflow_is_inf(self):
        assert analytic_dyxl_total(10, 100, 500, CostParams()) == math.inf
        table = cost_compare(CostParams(), [500], 10, 100)
        assert table.rows[0]["ratio"] == math.inf

    @pytest.mark.parametrize("fn", [analytic_dyxl, analytic_improved])
    def test_increments_sum_to_total(self, fn):
        led = fn(4.0, 16, 5, CostParams())
        assert sum(led.per_iteration_queries) == pytest.approx(led.total, rel=1e-12)
        assert led.cumulative[-1] == pytest.approx(led.total, rel=1e-12)


class TestComparison:
    def test_dyxl_ratio_is_T(self):
        p = CostParams()
        rows = cost_compare(p, range(1, 20), 10, 100).rows
        T = dyxl_T(10, 100, p)
        for a, b in zip(rows, rows[1:]):
            assert b["dyxl"] / a["dyxl"] == pytest.approx(T, rel=1e-12)

    def test_improved_doubling_ratio_tends_to_four(self):
        # the linear term fades as s grows; at kappa=2, k=4 it is small by s=512
        p = CostParams()
        r = [analytic_improved_total(2, 4, 2 * s, p) / analytic_improved_total(2, 4, s, p)
             for s in (512, 1024)]
        assert 3.9 < r[0] < r[1] < 4.0
        # larger kappa only delays the limit
        big = [analytic_improved_total(10, 100, 2 * s, p) / analytic_improved_total(10, 100, s, p)
               for s in (512, 1024, 2**14)]
        assert big[0] < big[1] < big[2] < 4.0

    def test_crossover(self):
        table = cost_compare(CostParams(), range(1, 10), 10, 100)
        assert table.crossover is not None
        for row in table.rows:
            assert (row["improved"] < row["dyxl"]) == (row["s"] >= table.crossover)
        assert table.to_dict()["crossover"] == table.crossover


class TestCounted:
    def test_repetitions(self):
        assert dyxl_repetitions(0.1, 0.25) == 20
        assert dyxl_repetitions(0.3, 0.5) == 4 * 2
        with pytest.raises(ValueError):
            dyxl_repetitions(0.1, 1.5)

    def test_dyxl_is_exact_product(self):
        p = CostParams()
        led = counted_dyxl(4.0, 16, 4, [0.1, 0.2, 0.3, 0.4], p, eps1=0.01)
        reps = [100 * math.ceil(1 / math.sqrt(q)) for q in (0.1, 0.2, 0.3, 0.4)]
        assert led.model_params["repetitions"] == reps
        assert led.total == math.prod(reps)
        assert isinstance(led.total, int)
        assert sum(led.per_iteration_queries) == led.total

    def test_dyxl_cap(self):
        counted_dyxl(2.0, 4, DYXL_COUNTED_CAP, 0.5, CostParams())
        with pytest.raises(LedgerCapExceeded):
            counted_dyxl(2.0, 4, DYXL_COUNTED_CAP + 1, 0.5, CostParams())

    def test_dyxl_probability_length(self):
        with pytest.raises(ValueError, match="need 3"):
            counted_dyxl(2.0, 4, 3, [0.5, 0.5], CostParams())

    def test_estimation_calls(self):
        assert estimation_calls(0.01, 0.25) == 400
        assert estimation_calls(0.3, 0.5) == 12

    def test_improved_exactly_quadratic(self):
        p = CostParams()
        tot = [counted_improved(4.0, 16, s, 0.3, p).total for s in range(1, 12)]
        second = [tot[i + 2] - 2 * tot[i + 1] + tot[i] for i in range(len(tot) - 2)]
        assert len(set(second[1:])) == 1 and second[1] > 0

    def test_improved_entries(self):
        led = counted_improved(4.0, 16, 5, 0.3, CostParams())
        assert led.total == sum(led.per_iteration_queries)
        assert all(isinstance(q, int) for q in led.per_iteration_queries)


class TestCostParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            CostParams(eps=1.5)
        with pytest.raises(ValueError):
            CostParams(n=0)

    def test_round_trip(self):
        p = CostParams(n=64, eps=1e-3, g0=3.0)
        assert CostParams.from_dict(p.to_dict()) == p
        with pytest.raises(KeyError, match="unknown"):
            CostParams.from_dict({"n": 3, "bogus": 1})
