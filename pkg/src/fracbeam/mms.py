"""Multiple-scales analysis of the nonlinear fractional oscillator.

Slow-flow amplitude/phase equations for free vibration, the decay rate and
its sensitivity to the fractional order, and the steady-state amplitude
cubic at primary resonance with discriminant-based root classification.

Conventions: the slow flow is written on the slow time scale T1 with the
cubic posed in x = a^2,

    (A2^2 + B2^2) x^3 + 2(A1 A2 + B1 B2) x^2 + (A1^2 + B1^2) x - C = 0,

where A1, A2 carry the damping (sin) projection, B1, B2 the detuning and
stiffness (cos) projection, and C = f^2 / (4 omega0^2).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .beammodel import ModalModel
from .errors import NumericalError
from .fracops import FracOrder, as_order

__all__ = [
    "ScaledCoeffs",
    "SlowFlowState",
    "Stability",
    "SteadyRoot",
    "SteadyStateCubic",
    "scale_coeffs",
    "slow_flow_free",
    "integrate_slow_flow",
    "decay_rate",
    "sensitivity",
    "critical_alpha",
    "steady_state_cubic",
    "classify_stability",
    "solve_steady_state",
    "frequency_response",
    "three_root_interval",
]

# Relative width of the degeneracy band around a vanishing discriminant.
DEGENERACY_BAND = 1e-10


@dataclass(frozen=True)
class ScaledCoeffs:
    """Mass-normalized coefficients feeding the slow-flow equations."""

    omega0: float
    c_l: float
    c_nl: float
    k_nl: float
    m_nl: float
    e_r: float
    alpha: FracOrder

    def __post_init__(self) -> None:
        if not self.omega0 > 0.0:
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        if not self.e_r > 0.0:
            raise ValueError(f"modulus ratio must be positive, got {self.e_r}")
        if self.m_nl < 0.0:
            raise ValueError(f"m_nl must be non-negative, got {self.m_nl}")
        object.__setattr__(self, "alpha", as_order(self.alpha))


def scale_coeffs(model: ModalModel, e_r: float, alpha: FracOrder | float) -> ScaledCoeffs:
    """Divide the modal coefficients by the modal mass."""
    return ScaledCoeffs(
        omega0=math.sqrt(model.k_lin / model.mass),
        c_l=model.c_lin / model.mass,
        c_nl=model.c_nl / model.mass,
        k_nl=model.k_nl / model.mass,
        m_nl=model.inertia_nl / model.mass,
        e_r=e_r,
        alpha=as_order(alpha),
    )


@dataclass(frozen=True)
class SlowFlowState:
    """Amplitude and phase lag on the slow time scale."""

    a: float
    phi: float = 0.0
    t1: float = 0.0

    def __post_init__(self) -> None:
        if self.a < 0.0:
            raise ValueError(f"amplitude must be non-negative, got {self.a}")


def _sin_cos_factors(co: ScaledCoeffs) -> tuple[float, float]:
    a = co.alpha.alpha
    common = co.e_r * co.omega0 ** (a - 1.0)
    return common * math.sin(a * math.pi / 2.0), common * math.cos(a * math.pi / 2.0)


def slow_flow_free(state: SlowFlowState, coeffs: ScaledCoeffs) -> tuple[float, float]:
    """Right-hand side (da/dT1, dphi/dT1) of the free-vibration slow flow.

    The m_nl term only contributes for the tip-mass configuration.
    """
    s_fac, c_fac = _sin_cos_factors(coeffs)
    a = state.a
    da = -s_fac * (0.5 * coeffs.c_l * a + 0.375 * coeffs.c_nl * a**3)
    dphi = (
        0.5 * coeffs.c_l * c_fac
        + 0.75 * coeffs.c_nl * c_fac * a**2
        + 0.75 * coeffs.k_nl / coeffs.omega0 * a**2
        - 0.25 * coeffs.m_nl * coeffs.omega0 * a**2
    )
    return da, dphi


def integrate_slow_flow(
    coeffs: ScaledCoeffs,
    a0: float,
    phi0: float = 0.0,
    t1_end: float = 20.0,
    dt1: float = 1e-3,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Classical fixed-step 4th-order integration of the free slow flow.

    The flow is non-stiff at the scales of interest; dt1 = 1e-3 resolves it
    far below the closed-form comparison tolerance.
    """
    if a0 < 0.0:
        raise ValueError(f"a0 must be non-negative, got {a0}")
    n = max(1, round(t1_end / dt1))
    t = np.arange(n + 1) * dt1
    a = np.empty(n + 1)
    phi = np.empty(n + 1)
    a[0], phi[0] = a0, phi0

    def rhs(ai: float) -> tuple[float, float]:
        return slow_flow_free(SlowFlowState(max(ai, 0.0), 0.0, 0.0), coeffs)

    for i in range(n):
        ai, pi_ = a[i], phi[i]
        k1a, k1p = rhs(ai)
        k2a, k2p = rhs(ai + 0.5 * dt1 * k1a)
        k3a, k3p = rhs(ai + 0.5 * dt1 * k2a)
        k4a, k4p = rhs(ai + dt1 * k3a)
        a[i + 1] = ai + dt1 / 6.0 * (k1a + 2 * k2a + 2 * k3a + k4a)
        phi[i + 1] = pi_ + dt1 / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
        if not math.isfinite(a[i + 1]):
            raise NumericalError(f"slow-flow amplitude diverged at step {i + 1}")
    for arr in (t, a, phi):
        arr.setflags(write=False)
    return t, a, phi


def decay_rate(coeffs: ScaledCoeffs, alpha: float | None = None) -> float:
    """Linear decay rate c_l E_r omega0^(alpha-1) sin(alpha pi/2).

    ``alpha`` may override the coefficient order; boundary values 0 and 1
    are meaningful for the formula and therefore accepted here.
    """
    a = coeffs.alpha.alpha if alpha is None else float(alpha)
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {a}")
    return coeffs.c_l * coeffs.e_r * coeffs.omega0 ** (a - 1.0) * math.sin(a * math.pi / 2.0)


def sensitivity(coeffs: ScaledCoeffs, alpha: float | None = None) -> float:
    """Derivative of the decay rate with respect to the fractional order."""
    a = coeffs.alpha.alpha if alpha is None else float(alpha)
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {a}")
    w = coeffs.omega0
    pref = coeffs.c_l * coeffs.e_r * w ** (a - 1.0)
    return pref * (0.5 * math.pi * math.cos(a * math.pi / 2.0) + math.sin(a * math.pi / 2.0) * math.log(w))


def _sensitivity_slope_factor(omega0: float, a: float) -> float:
    """Sign-carrying factor of d(sensitivity)/d(alpha); the positive prefactor
    c_l E_r omega0^(alpha-1) is dropped."""
    big_l = math.log(omega0)
    half_pi_a = a * math.pi / 2.0
    return math.pi * big_l * math.cos(half_pi_a) + (big_l**2 - math.pi**2 / 4.0) * math.sin(half_pi_a)


def critical_alpha(coeffs: ScaledCoeffs, tol: float = 1e-12) -> float | None:
    """Order at which the decay-rate sensitivity is stationary.

    Bisection on the analytic derivative of the sensitivity; returns None
    when no stationary point lies inside (0, 1) (in particular for
    omega0 = 1, where the log term vanishes).
    """
    w = coeffs.omega0
    lo, hi = 0.0, 1.0
    g_lo, g_hi = _sensitivity_slope_factor(w, lo), _sensitivity_slope_factor(w, hi)
    if g_lo == 0.0 or g_hi == 0.0 or g_lo * g_hi > 0.0:
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        g_mid = _sensitivity_slope_factor(w, mid)
        if g_mid == 0.0:
            return mid
        if g_lo * g_mid < 0.0:
            hi = mid
        else:
            lo, g_lo = mid, g_mid
    return 0.5 * (lo + hi)


class Stability(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


@dataclass(frozen=True)
class SteadyRoot:
    amplitude: float
    stability: Stability | None = None


@dataclass(frozen=True)
class SteadyStateCubic:
    """Steady-state amplitude cubic in x = a^2 and its admissible roots."""

    a1: float
    a2: float
    b1: float
    b2: float
    forcing: float  # C = f^2 / (4 omega0^2)
    cubic: tuple[float, float, float, float]  # coefficients of x^3..x^0
    discriminant: float
    degenerate: bool
    roots: tuple[SteadyRoot, ...]

    def amplitudes(self) -> tuple[float, ...]:
        return tuple(r.amplitude for r in self.roots)


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def _real_cubic_roots(c3: float, c2: float, c1: float, c0: float) -> list[float]:
    """Real roots of c3 x^3 + c2 x^2 + c1 x + c0 (c3 != 0).

    Trigonometric form for three real roots, Cardano otherwise, then Newton
    polish; falls back to the companion matrix if anything degrades.
    """
    b, c, d = c2 / c3, c1 / c3, c0 / c3
    p = c - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    shift = -b / 3.0
    disc = -4.0 * p**3 - 27.0 * q * q
    roots: list[float]
    if disc > 0.0:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = min(1.0, max(-1.0, 3.0 * q / (p * m)))
        theta = math.acos(arg) / 3.0
        roots = [shift + m * math.cos(theta - 2.0 * math.pi * k / 3.0) for k in range(3)]
    elif p == 0.0 and q == 0.0:
        roots = [shift]
    else:
        radicand = q * q / 4.0 + p**3 / 27.0
        if radicand >= 0.0:
            rt = math.sqrt(radicand)
            roots = [shift + _cbrt(-q / 2.0 + rt) + _cbrt(-q / 2.0 - rt)]
        else:  # disc == 0 with distinct double root
            roots = [shift + 3.0 * q / p, shift - 1.5 * q / p]

    def polish(x: float) -> float:
        for _ in range(3):
            f = ((c3 * x + c2) * x + c1) * x + c0
            df = (3.0 * c3 * x + 2.0 * c2) * x + c1
            if df == 0.0:
                break
            x -= f / df
        return x

    roots = [polish(x) for x in roots]
    if not all(math.isfinite(x) for x in roots):
        comp = np.roots([c3, c2, c1, c0])
        scale = max(1.0, float(np.max(np.abs(comp))))
        roots = [float(r.real) for r in comp if abs(r.imag) < 1e-9 * scale]
    return roots


def cubic_discriminant(c3: float, c2: float, c1: float, c0: float) -> float:
    return (
        18.0 * c3 * c2 * c1 * c0
        - 4.0 * c2**3 * c0
        + c2**2 * c1**2
        - 4.0 * c3 * c1**3
        - 27.0 * c3**2 * c0**2
    )


def _discriminant_scale(c3: float, c2: float, c1: float, c0: float) -> float:
    return max(
        abs(18.0 * c3 * c2 * c1 * c0),
        abs(4.0 * c2**3 * c0),
        abs(c2**2 * c1**2),
        abs(4.0 * c3 * c1**3),
        abs(27.0 * c3**2 * c0**2),
        1e-300,
    )


def steady_state_cubic(coeffs: ScaledCoeffs, delta: float, f: float) -> SteadyStateCubic:
    """Amplitude cubic of the primary-resonance steady state.

    For the tip-mass configuration B2 carries the extra m_nl omega0 / 3 term
    inside its bracket. f = 0 short-circuits to the single admissible
    amplitude a = 0.
    """
    if f < 0.0:
        raise ValueError(f"forcing amplitude must be non-negative, got {f}")
    s_fac, c_fac = _sin_cos_factors(coeffs)
    a1 = 0.5 * coeffs.c_l * s_fac
    a2 = 0.375 * coeffs.c_nl * s_fac
    b1 = delta - 0.5 * coeffs.c_l * c_fac
    b2 = -0.75 * (coeffs.c_nl * c_fac + coeffs.k_nl / coeffs.omega0 + coeffs.m_nl * coeffs.omega0 / 3.0)
    big_c = f * f / (4.0 * coeffs.omega0**2)
    cubic = (a2 * a2 + b2 * b2, 2.0 * (a1 * a2 + b1 * b2), a1 * a1 + b1 * b1, -big_c)
    disc = cubic_discriminant(*cubic)
    degenerate = abs(disc) <= DEGENERACY_BAND * _discriminant_scale(*cubic)

    if f == 0.0:
        roots = (SteadyRoot(0.0),)
    else:
        xs = [x for x in _real_cubic_roots(*cubic) if x >= -1e-12]
        xs = sorted(max(x, 0.0) for x in xs)
        kept = []
        for x in xs:
            res = ((cubic[0] * x + cubic[1]) * x + cubic[2]) * x + cubic[3]
            term_scale = abs(cubic[0]) * x**3 + abs(cubic[1]) * x**2 + abs(cubic[2]) * x + abs(cubic[3])
            if abs(res) > max(1e-9 * max(1.0, big_c), 1e-11 * term_scale):
                raise NumericalError(f"cubic root residual {res:g} exceeds tolerance at x={x:g}")
            # near-degenerate pairs collapse to one reported amplitude
            if kept and abs(x - kept[-1]) <= 1e-12 * max(1.0, abs(x)):
                continue
            kept.append(x)
        roots = tuple(SteadyRoot(math.sqrt(x)) for x in kept)
    return SteadyStateCubic(a1, a2, b1, b2, big_c, cubic, disc, degenerate, roots)


def classify_stability(
    cubic: SteadyStateCubic,
    coeffs: ScaledCoeffs,
    delta: float,
    f: float,
) -> tuple[Stability, ...]:
    """Stability of each steady amplitude from the autonomous slow-flow Jacobian.

    At a fixed point the Jacobian trace is -2 A1 - 4 A2 a^2 < 0, so the sign
    of the determinant decides: positive means stable. The a = 0 fixed point
    (free case) is classified from the amplitude equation alone, whose
    linearization is -A1 < 0.
    """
    a1, a2, b1, b2 = cubic.a1, cubic.a2, cubic.b1, cubic.b2
    flags = []
    for root in cubic.roots:
        x = root.amplitude**2
        if root.amplitude == 0.0:
            flags.append(Stability.STABLE)
            continue
        det = (a1 + 3.0 * a2 * x) * (a1 + a2 * x) + (b1 + 3.0 * b2 * x) * (b1 + b2 * x)
        scale = max(a1 * a1, b1 * b1, (a2 * x) ** 2, (b2 * x) ** 2, 1e-300)
        if abs(det) <= 1e-12 * scale:
            flags.append(Stability.MARGINAL)
        elif det > 0.0:
            flags.append(Stability.STABLE)
        else:
            flags.append(Stability.UNSTABLE)
    return tuple(flags)


def solve_steady_state(coeffs: ScaledCoeffs, delta: float, f: float) -> SteadyStateCubic:
    """steady_state_cubic with stability flags attached to the roots."""
    cubic = steady_state_cubic(coeffs, delta, f)
    flags = classify_stability(cubic, coeffs, delta, f)
    roots = tuple(replace(r, stability=s) for r, s in zip(cubic.roots, flags))
    return replace(cubic, roots=roots)


def frequency_response(coeffs: ScaledCoeffs, deltas, f: float) -> list[tuple[float, SteadyStateCubic]]:
    """Classified steady amplitudes across a detuning sweep."""
    return [(float(d), solve_steady_state(coeffs, float(d), f)) for d in deltas]


def _admissible_count(coeffs: ScaledCoeffs, f: float, delta: float) -> int:
    return len(steady_state_cubic(coeffs, delta, f).roots)


def three_root_interval(
    coeffs: ScaledCoeffs,
    f: float,
    delta_span: tuple[float, float] | None = None,
    scan_points: int = 2001,
    xtol: float = 1e-10,
) -> tuple[float, float] | None:
    """Detuning interval over which three admissible amplitudes coexist.

    Scans the span for transitions in the admissible-root count and bisects
    each one. When no span is given it is derived from the amplitude bound
    sqrt(C)/A1 of the damping balance.
    """
    if not f > 0.0:
        raise ValueError("the multi-root interval requires f > 0")
    probe = steady_state_cubic(coeffs, 0.0, f)
    if delta_span is None:
        x_up = (math.sqrt(probe.forcing) / probe.a1) ** 2
        center = 0.5 * coeffs.c_l * _sin_cos_factors(coeffs)[1]
        hi = center + 1.2 * abs(probe.b2) * x_up + 1.0
        lo = center - 0.1 * abs(probe.b2) * x_up - 1.0
        delta_span = (lo, hi)
    grid = np.linspace(delta_span[0], delta_span[1], scan_points)
    counts = [_admissible_count(coeffs, f, d) for d in grid]

    def bisect(d_lo: float, d_hi: float, want_left: int) -> float:
        while d_hi - d_lo > xtol:
            mid = 0.5 * (d_lo + d_hi)
            if _admissible_count(coeffs, f, mid) == want_left:
                d_lo = mid
            else:
                d_hi = mid
        return 0.5 * (d_lo + d_hi)

    enter = exit_ = None
    for i in range(len(grid) - 1):
        if counts[i] < 3 and counts[i + 1] == 3 and enter is None:
            enter = bisect(grid[i], grid[i + 1], counts[i])
        if counts[i] == 3 and counts[i + 1] < 3:
            exit_ = bisect(grid[i], grid[i + 1], 3)
    if enter is None or exit_ is None:
        return None
    return enter, exit_
