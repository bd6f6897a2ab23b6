import math

import numpy as np
import pytest

from fracbeam import (
    FracOrder,
    ScaledCoeffs,
    SlowFlowState,
    Stability,
    classify_stability,
    critical_alpha,
    decay_rate,
    frequency_response,
    integrate_slow_flow,
    scale_coeffs,
    sensitivity,
    slow_flow_free,
    solve_steady_state,
    steady_state_cubic,
    three_root_interval,
)

# mass-normalized coefficients of the reference configurations
CASE1 = dict(omega0=math.sqrt(12.3624), c_l=12.3624, c_nl=20.2203, k_nl=20.2203, m_nl=0.0)


def coeffs1(alpha, e_r=0.1):
    return ScaledCoeffs(alpha=FracOrder(alpha), e_r=e_r, **CASE1)


def bernoulli_amplitude(coeffs, a0, t1):
    """Closed-form solution of da/dT1 = -K1 a - K2 a^3 (logistic in a^2)."""
    a = coeffs.alpha.alpha
    s = coeffs.e_r * coeffs.omega0 ** (a - 1.0) * math.sin(a * math.pi / 2.0)
    k1 = 0.5 * coeffs.c_l * s
    k2 = 0.375 * coeffs.c_nl * s
    e = np.exp(-2.0 * k1 * t1)
    return np.sqrt(k1 * a0**2 * e / (k1 + k2 * a0**2 * (1.0 - e)))


class TestScaleCoeffs:
    def test_case1(self, case_no_tip_mass):
        co = scale_coeffs(case_no_tip_mass, 0.1, 0.5)
        assert co.omega0 == pytest.approx(3.51602, abs=1e-4)
        assert co.m_nl == 0.0
        assert co.c_l == pytest.approx(12.3624, rel=1e-3)

    def test_case2(self, case_tip_mass):
        co = scale_coeffs(case_tip_mass, 0.3, 0.5)
        mass = 1.0 + 70.769 + 7.2734
        assert co.m_nl == pytest.approx(5008.25 / mass, rel=1e-3)
        assert co.omega0 == pytest.approx(math.sqrt(98.1058 / mass), rel=1e-3)

    def test_validation(self):
        with pytest.raises(ValueError):
            ScaledCoeffs(omega0=-1.0, c_l=1.0, c_nl=1.0, k_nl=1.0, m_nl=0.0, e_r=1.0, alpha=FracOrder(0.5))
        with pytest.raises(ValueError):
            SlowFlowState(a=-0.1)


class TestSlowFlowFree:
    def test_zero_amplitude_fixed_point(self):
        co = coeffs1(0.4)
        da, dphi = slow_flow_free(SlowFlowState(0.0), co)
        assert da == 0.0
        a = 0.4
        want = 0.5 * co.c_l * co.e_r * co.omega0 ** (a - 1.0) * math.cos(a * math.pi / 2.0)
        assert dphi == pytest.approx(want, rel=1e-14)

    def test_phase_rate_positive_without_tip_mass(self):
        co = coeffs1(0.6)
        for a in (0.0, 0.3, 1.0):
            assert slow_flow_free(SlowFlowState(a), co)[1] > 0.0

    def test_tip_mass_term_slows_phase(self):
        base = coeffs1(0.6)
        tip = ScaledCoeffs(
            omega0=base.omega0, c_l=base.c_l, c_nl=base.c_nl, k_nl=base.k_nl,
            m_nl=2.0, e_r=base.e_r, alpha=base.alpha,
        )
        a = 0.7
        d_base = slow_flow_free(SlowFlowState(a), base)[1]
        d_tip = slow_flow_free(SlowFlowState(a), tip)[1]
        assert d_tip == pytest.approx(d_base - 0.25 * 2.0 * base.omega0 * a**2, rel=1e-12)

    @pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
    @pytest.mark.parametrize("e_r", [0.1, 1.0])
    def test_matches_bernoulli_closed_form(self, alpha, e_r):
        co = coeffs1(alpha, e_r)
        t1, a, _ = integrate_slow_flow(co, a0=1.0, t1_end=20.0, dt1=1e-3)
        want = bernoulli_amplitude(co, 1.0, t1)
        rel = np.max(np.abs(a - want) / want)
        assert rel < 1e-8

    def test_decay_ordering_in_alpha(self):
        # larger order drains the amplitude faster for the reference preset
        t1, a_low, _ = integrate_slow_flow(coeffs1(0.1), a0=1.0, t1_end=10.0, dt1=1e-3)
        _, a_high, _ = integrate_slow_flow(coeffs1(0.9), a0=1.0, t1_end=10.0, dt1=1e-3)
        assert np.all(a_high[1:] < a_low[1:])


class TestDecayRateAndSensitivity:
    def test_vanishing_order_limit(self):
        assert decay_rate(coeffs1(0.5), alpha=0.0) == 0.0

    def test_integer_order_boundary(self):
        co = coeffs1(0.5)
        assert decay_rate(co, alpha=1.0) == pytest.approx(co.c_l * co.e_r, rel=1e-14)

    def test_reference_value(self):
        assert decay_rate(coeffs1(0.5, 0.1)) == pytest.approx(0.4662, abs=2e-4)

    def test_sensitivity_matches_finite_differences(self):
        co = coeffs1(0.5, 0.3)
        h = 1e-5
        for a in np.linspace(0.05, 0.95, 19):
            fd = (decay_rate(co, a + h) - decay_rate(co, a - h)) / (2.0 * h)
            assert sensitivity(co, a) == pytest.approx(fd, abs=1e-6)

    def test_small_order_limit(self):
        co = coeffs1(0.5)
        want = 0.5 * math.pi * co.c_l * co.e_r / co.omega0
        assert sensitivity(co, alpha=0.0) == pytest.approx(want, rel=1e-12)

    def test_unit_frequency_sensitivity_positive(self):
        co = ScaledCoeffs(omega0=1.0, c_l=2.0, c_nl=1.0, k_nl=1.0, m_nl=0.0, e_r=0.5, alpha=FracOrder(0.5))
        for a in np.linspace(0.05, 0.95, 10):
            want = 0.5 * math.pi * 2.0 * 0.5 * math.cos(a * math.pi / 2.0)
            got = sensitivity(co, a)
            assert got == pytest.approx(want, rel=1e-12)
            assert got > 0.0


class TestCriticalAlpha:
    def test_reference_frequency(self):
        a_cr = critical_alpha(coeffs1(0.5))
        assert a_cr == pytest.approx(0.8596, abs=1e-3)

    def test_tangent_identity(self):
        co = coeffs1(0.5)
        a_cr = critical_alpha(co)
        big_l = math.log(co.omega0)
        lhs = math.tan(a_cr * math.pi / 2.0) * (math.pi**2 / 4.0 - big_l**2)
        assert lhs == pytest.approx(math.pi * big_l, rel=1e-9)

    def test_local_maximum(self):
        co = coeffs1(0.5)
        a_cr = critical_alpha(co)
        assert sensitivity(co, a_cr) > sensitivity(co, a_cr - 0.05)
        assert sensitivity(co, a_cr) > sensitivity(co, a_cr + 0.05)

    def test_unit_frequency_has_no_critical_point(self):
        co = ScaledCoeffs(omega0=1.0, c_l=1.0, c_nl=1.0, k_nl=1.0, m_nl=0.0, e_r=1.0, alpha=FracOrder(0.5))
        assert critical_alpha(co) is None

    def test_bracket_width(self):
        co = coeffs1(0.5)
        a_cr = critical_alpha(co, tol=1e-12)
        from fracbeam.mms import _sensitivity_slope_factor

        g = lambda a: _sensitivity_slope_factor(co.omega0, a)
        assert g(a_cr - 1e-12) * g(a_cr + 1e-12) <= 0.0


class TestSteadyStateCubic:
    def test_zero_forcing_gives_only_rest(self):
        cubic = steady_state_cubic(coeffs1(0.3, 0.3), delta=2.0, f=0.0)
        assert cubic.amplitudes() == (0.0,)

    def test_negative_forcing_rejected(self):
        with pytest.raises(ValueError):
            steady_state_cubic(coeffs1(0.3), 0.0, -1.0)

    def test_coefficient_formulas(self):
        co = coeffs1(0.3, 0.3)
        delta, f = 1.5, 1.0
        cubic = steady_state_cubic(co, delta, f)
        a = 0.3
        fac = co.e_r * co.omega0 ** (a - 1.0)
        assert cubic.a1 == pytest.approx(0.5 * co.c_l * fac * math.sin(a * math.pi / 2), rel=1e-14)
        assert cubic.a2 == pytest.approx(0.375 * co.c_nl * fac * math.sin(a * math.pi / 2), rel=1e-14)
        assert cubic.b1 == pytest.approx(delta - 0.5 * co.c_l * fac * math.cos(a * math.pi / 2), rel=1e-14)
        assert cubic.b2 == pytest.approx(
            -0.75 * (co.c_nl * fac * math.cos(a * math.pi / 2) + co.k_nl / co.omega0), rel=1e-14
        )
        assert cubic.forcing == pytest.approx(f**2 / (4.0 * co.omega0**2), rel=1e-14)

    def test_tip_mass_detunes_b2(self, case_tip_mass):
        co = scale_coeffs(case_tip_mass, 0.3, 0.4)
        cubic = steady_state_cubic(co, 0.5, 1.0)
        a = 0.4
        fac = co.e_r * co.omega0 ** (a - 1.0)
        want = -0.75 * (
            co.c_nl * fac * math.cos(a * math.pi / 2)
            + co.k_nl / co.omega0
            + co.m_nl * co.omega0 / 3.0
        )
        assert cubic.b2 == pytest.approx(want, rel=1e-14)

    def test_squared_sum_identity_at_roots(self):
        co = coeffs1(0.2, 0.3)
        for delta in np.linspace(-1.0, 6.0, 40):
            cubic = steady_state_cubic(co, delta, 1.0)
            for root in cubic.roots:
                a = root.amplitude
                lhs = (cubic.a1 * a + cubic.a2 * a**3) ** 2 + (cubic.b1 * a + cubic.b2 * a**3) ** 2
                assert abs(lhs - cubic.forcing) < 1e-9 * max(1.0, cubic.forcing)

    def test_root_count_matches_discriminant_sign(self):
        rng = np.random.default_rng(11)
        checked = 0
        for _ in range(1500):
            alpha = rng.uniform(0.05, 0.95)
            e_r = rng.uniform(0.05, 2.0)
            f = rng.uniform(0.01, 2.0)
            delta = rng.uniform(-5.0, 15.0)
            cubic = steady_state_cubic(coeffs1(alpha, e_r), delta, f)
            if cubic.degenerate:
                continue
            checked += 1
            # companion-matrix oracle
            r = np.roots(cubic.cubic)
            n_real = int(np.sum(np.abs(r.imag) < 1e-9 * max(1.0, np.max(np.abs(r)))))
            assert n_real == (3 if cubic.discriminant > 0 else 1)
        assert checked > 1400


class TestStability:
    def test_single_root_regimes_are_stable(self):
        co = coeffs1(0.4, 0.3)
        cubic = solve_steady_state(co, -2.0, 1.0)
        assert len(cubic.roots) == 1
        assert cubic.roots[0].stability is Stability.STABLE

    def test_three_root_pattern(self):
        co = coeffs1(0.1, 0.3)
        interval = three_root_interval(co, 1.0)
        assert interval is not None
        mid = 0.5 * (interval[0] + interval[1])
        cubic = solve_steady_state(co, mid, 1.0)
        flags = [r.stability for r in cubic.roots]
        assert flags == [Stability.STABLE, Stability.UNSTABLE, Stability.STABLE]

    def test_rest_state_stable_without_forcing(self):
        co = coeffs1(0.5, 0.3)
        cubic = steady_state_cubic(co, 1.0, 0.0)
        flags = classify_stability(cubic, co, 1.0, 0.0)
        assert flags == (Stability.STABLE,)


class TestFrequencyResponse:
    def test_zero_forcing_flat(self):
        co = coeffs1(0.4, 0.3)
        resp = frequency_response(co, np.linspace(-2, 2, 9), 0.0)
        assert all(cubic.amplitudes() == (0.0,) for _, cubic in resp)

    def test_peak_decreases_with_modulus_ratio(self):
        deltas = np.linspace(-2.0, 10.0, 301)
        peaks = []
        for e_r in (0.1, 1.0):
            resp = frequency_response(coeffs1(0.3, e_r), deltas, 0.5)
            peaks.append(max(max(c.amplitudes()) for _, c in resp))
        assert peaks[1] < peaks[0]

    def test_three_root_interval_shrinks_with_alpha(self):
        widths = []
        for alpha in (0.1, 0.2, 0.3):
            iv = three_root_interval(coeffs1(alpha, 0.3), 1.0)
            assert iv is not None
            widths.append(iv[1] - iv[0])
        assert widths[0] > widths[1] > widths[2]

    def test_no_interval_when_damping_dominates(self):
        assert three_root_interval(coeffs1(0.6, 1.0), 0.1) is None
