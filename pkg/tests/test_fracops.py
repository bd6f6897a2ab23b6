import math

import numpy as np
import pytest

from fracbeam import (
    FracOrder,
    TimeGrid,
    caputo_l1,
    caputo_l1_series,
    frac_deriv_monomial,
    gamma,
    l1_weights,
    rl_from_caputo,
)


class TestGamma:
    def test_known_values(self):
        assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
        assert gamma(1.0) == pytest.approx(1.0, rel=1e-14)
        assert gamma(5.0) == pytest.approx(24.0, rel=1e-14)
        assert gamma(1.5) == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-14)

    def test_against_stdlib_on_dense_grid(self):
        # math.gamma is the independent oracle here
        for x in np.linspace(0.01, 30.0, 4001):
            assert abs(gamma(x) - math.gamma(x)) <= 1e-13 * math.gamma(x)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            gamma(0.0)
        with pytest.raises(ValueError):
            gamma(-1.3)


class TestFracOrder:
    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.7, float("nan")])
    def test_rejects_outside_open_interval(self, bad):
        with pytest.raises(ValueError):
            FracOrder(bad)

    def test_float_conversion(self):
        assert float(FracOrder(0.37)) == 0.37


class TestTimeGrid:
    def test_times_are_exact_multiples(self):
        g = TimeGrid(0.1, 10)
        t = g.times()
        assert t[3] == 3 * 0.1
        assert t.size == 11
        assert g.t_end == 10 * 0.1

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            TimeGrid(0.0, 5)
        with pytest.raises(ValueError):
            TimeGrid(0.1, 0)

    def test_from_span(self):
        g = TimeGrid.from_span(1e-3, 2.0)
        assert g.n_steps == 2000


class TestL1Weights:
    def test_first_weight_is_one(self):
        for alpha in (0.1, 0.5, 0.9):
            assert l1_weights(alpha, 5).b[0] == 1.0

    def test_half_order_second_weight(self):
        assert l1_weights(0.5, 2).b[1] == pytest.approx(math.sqrt(2.0) - 1.0, rel=1e-15)

    def test_memoryless_limit(self):
        # exponent 1 - alpha -> 0 kills every weight past the first
        b = l1_weights(0.999, 50).b
        assert b[0] == 1.0
        assert np.all(b[1:] < 1e-2)

    @pytest.mark.parametrize("alpha", [0.05, 0.3, 0.5, 0.7, 0.95])
    def test_positive_and_strictly_decreasing_large_n(self, alpha):
        b = l1_weights(alpha, 1_000_000).b
        assert b[0] == 1.0
        assert np.all(b > 0.0)
        assert np.all(np.diff(b) < 0.0)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            l1_weights(0.5, 0)


class TestCaputoL1:
    def test_constant_history_is_zero(self):
        grid = TimeGrid(0.01, 100)
        q = np.full(50, 3.7)
        assert caputo_l1(q, grid, 0.5) == 0.0

    @pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
    @pytest.mark.parametrize("n", [3, 17, 100])
    def test_exact_on_linear_history(self, alpha, n):
        dt = 0.013
        t = np.arange(n + 1) * dt
        q = 2.5 * t - 0.0  # slope 2.5
        got = caputo_l1(q, dt, alpha)
        want = 2.5 * frac_deriv_monomial(1.0, alpha, t[-1])
        assert got == pytest.approx(want, rel=1e-13)

    def test_quadratic_at_half_order(self):
        # analytic: Gamma(3)/Gamma(2.5) * t^1.5 = 1.504506 at t = 1
        dt = 0.01
        t = np.arange(101) * dt
        got = caputo_l1(t**2, dt, 0.5)
        want = 2.0 / gamma(2.5)
        assert want == pytest.approx(1.504506, abs=5e-7)
        assert got == pytest.approx(want, abs=1e-3)  # O(dt^1.5)

    def test_linearity_in_history(self):
        rng = np.random.default_rng(7)
        q = rng.normal(size=40)
        r = rng.normal(size=40)
        a, b = 1.7, -0.3
        lhs = caputo_l1(a * q + b * r, 0.02, 0.35)
        rhs = a * caputo_l1(q, 0.02, 0.35) + b * caputo_l1(r, 0.02, 0.35)
        scale = max(1.0, abs(lhs))
        assert abs(lhs - rhs) <= 1e-12 * scale

    def test_convergence_order_on_quadratic(self):
        alpha = 0.5
        errs = []
        for dt in (1e-2, 5e-3, 2.5e-3, 1.25e-3):
            n = round(1.0 / dt)
            t = np.arange(n + 1) * dt
            err = abs(caputo_l1(t**2, dt, alpha) - frac_deriv_monomial(2.0, alpha, 1.0))
            errs.append(err)
        orders = [math.log2(errs[i] / errs[i + 1]) for i in range(len(errs) - 1)]
        assert all(abs(o - (2.0 - alpha)) <= 0.1 for o in orders)

    def test_series_matches_scalar_evaluation(self):
        rng = np.random.default_rng(3)
        q = rng.normal(size=25)
        grid = TimeGrid(0.05, 24)
        series = caputo_l1_series(q, grid, 0.6)
        assert series[0] == 0.0
        for k in range(1, 25):
            assert series[k] == pytest.approx(caputo_l1(q[: k + 1], grid, 0.6), rel=1e-13, abs=1e-13)

    def test_too_short_history_rejected(self):
        with pytest.raises(ValueError):
            caputo_l1([1.0], 0.1, 0.5)


class TestRlFromCaputo:
    def test_zero_initial_value_changes_nothing(self):
        assert rl_from_caputo(1.234, 0.0, 2.0, 0.4) == 1.234

    def test_half_order_correction(self):
        # 1 / Gamma(0.5) = 1 / sqrt(pi)
        got = rl_from_caputo(0.0, 1.0, 1.0, 0.5)
        assert got == pytest.approx(1.0 / math.sqrt(math.pi), rel=1e-13)
        assert got == pytest.approx(0.564190, abs=5e-7)

    def test_generic_correction(self):
        got = rl_from_caputo(0.0, 0.01, 10.0, 0.3)
        want = 0.01 / (math.gamma(0.7) * 10.0**0.3)
        assert got == pytest.approx(want, rel=1e-13)

    def test_singular_at_origin(self):
        with pytest.raises(ValueError):
            rl_from_caputo(0.0, 1.0, 0.0, 0.5)


class TestFracDerivMonomial:
    def test_constant_is_zero(self):
        assert frac_deriv_monomial(0.0, 0.5, 1.0) == 0.0

    def test_linear_half_order(self):
        got = frac_deriv_monomial(1.0, 0.5, 1.0)
        assert got == pytest.approx(2.0 / math.sqrt(math.pi), rel=1e-13)
        assert got == pytest.approx(1.128379, abs=5e-7)

    def test_cubic_generic(self):
        got = frac_deriv_monomial(3.0, 0.3, 2.0)
        want = 6.0 / math.gamma(3.7) * 2.0**2.7
        assert got == pytest.approx(want, rel=1e-13)

    def test_domain_checks(self):
        with pytest.raises(ValueError):
            frac_deriv_monomial(-1.0, 0.5, 1.0)
        with pytest.raises(ValueError):
            frac_deriv_monomial(2.0, 0.5, 0.0)
