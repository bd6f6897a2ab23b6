"""Direct time integration of the linearized fractional oscillator.

The equation of motion is

    q'' + E_r c_l D^alpha q + k_l q = -m_b vb''(t)

with D^alpha the Riemann-Liouville derivative (equal to the Caputo
derivative plus the singular initial-value term q0 / (Gamma(1-alpha) t^alpha)).
The Caputo part is discretized by the L1 scheme on a uniform grid and the
step is closed in displacement through the Newmark update, giving

    q_{n+1} = [(a1 + E*) q_n + a2 q'_n + a3 q''_n - m_b vb''_{n+1}
               - E* (H_{n+1} + q0 (1-alpha)/(n+1)^alpha)] / (a1 + E* + k_l)

with E* = E_r c_l / (dt^alpha Gamma(2-alpha)) and H the L1 history sum.
Dropping the q0 term gives the Caputo variant; a classical Kelvin-Voigt
variant replaces the fractional term with E_r c_l q'.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .beammodel import ModalModel
from .errors import NumericalError
from .fracops import FracOrder, TimeGrid, as_order, gamma, l1_weights

__all__ = [
    "Variant",
    "OscillatorParams",
    "NewmarkParams",
    "Excitation",
    "TrajectoryRecord",
    "step_closed_form",
    "integrate",
    "amplitude_sweep",
]


class Variant(enum.Enum):
    RIEMANN_LIOUVILLE = "riemann-liouville"
    CAPUTO = "caputo"
    CLASSICAL_KV = "classical-kv"


@dataclass(frozen=True)
class OscillatorParams:
    """Mass-normalized oscillator coefficients c_l, k_l, m_b and damping variant."""

    c_l: float
    k_l: float
    m_b: float
    e_r: float
    alpha: FracOrder | None
    variant: Variant = Variant.RIEMANN_LIOUVILLE

    def __post_init__(self) -> None:
        if not (self.c_l > 0.0 and self.k_l > 0.0):
            raise ValueError("c_l and k_l must be positive")
        if self.e_r < 0.0:
            raise ValueError(f"modulus ratio must be non-negative, got {self.e_r}")
        if self.variant is not Variant.CLASSICAL_KV:
            if self.alpha is None:
                raise ValueError("fractional variants require a fractional order")
            object.__setattr__(self, "alpha", as_order(self.alpha))

    @classmethod
    def from_modal_model(
        cls,
        model: ModalModel,
        e_r: float,
        alpha: FracOrder | float | None,
        variant: Variant = Variant.RIEMANN_LIOUVILLE,
    ) -> "OscillatorParams":
        order = None if alpha is None else as_order(alpha)
        return cls(
            c_l=model.c_lin / model.mass,
            k_l=model.k_lin / model.mass,
            m_b=model.m_base / model.mass,
            e_r=e_r,
            alpha=order,
            variant=variant,
        )


@dataclass(frozen=True)
class NewmarkParams:
    """Newmark update coefficients; defaults are the unconditionally stable
    average-acceleration choice gamma = 1/2, beta = 1/4."""

    beta_nm: float = 0.25
    gamma_nm: float = 0.5

    def __post_init__(self) -> None:
        if not (2.0 * self.beta_nm >= self.gamma_nm >= 0.5):
            raise ValueError("stability requires 2*beta_nm >= gamma_nm >= 1/2")


class ExcitationKind(enum.Enum):
    FREE = "free"
    HARMONIC_BASE = "harmonic-base"


@dataclass(frozen=True)
class Excitation:
    """Base motion vb(t) = a_b sin(omega_b t), or free vibration."""

    kind: ExcitationKind = ExcitationKind.FREE
    a_b: float = 0.0
    omega_b: float = 0.0

    def __post_init__(self) -> None:
        if self.a_b < 0.0:
            raise ValueError(f"amplitude must be non-negative, got {self.a_b}")
        if self.kind is ExcitationKind.HARMONIC_BASE and not self.omega_b > 0.0:
            raise ValueError(f"harmonic excitation needs omega_b > 0, got {self.omega_b}")

    @classmethod
    def free(cls) -> "Excitation":
        return cls(ExcitationKind.FREE)

    @classmethod
    def harmonic_base(cls, a_b: float, omega_b: float) -> "Excitation":
        return cls(ExcitationKind.HARMONIC_BASE, a_b, omega_b)

    def base_accel(self, t: float) -> float:
        """vb''(t); zero for free vibration."""
        if self.kind is ExcitationKind.FREE or self.a_b == 0.0:
            return 0.0
        return -self.a_b * self.omega_b**2 * math.sin(self.omega_b * t)


@dataclass(frozen=True)
class TrajectoryRecord:
    """Displacement/velocity/acceleration samples on a uniform grid."""

    grid: TimeGrid
    q: np.ndarray
    qdot: np.ndarray
    qddot: np.ndarray
    params: OscillatorParams
    excitation: Excitation

    def __post_init__(self) -> None:
        n = self.grid.n_steps + 1
        for name in ("q", "qdot", "qddot"):
            if getattr(self, name).shape != (n,):
                raise ValueError(f"{name} must have n_steps + 1 = {n} samples")

    def times(self) -> np.ndarray:
        return self.grid.times()


def step_closed_form(
    history,
    qdot_n: float,
    qddot_n: float,
    params: OscillatorParams,
    dt: float,
    base_accel_next: float,
    newmark: NewmarkParams = NewmarkParams(),
) -> float:
    """One closed-form displacement step of the fractional oscillator.

    ``history`` holds q_0..q_n; the return value is q_{n+1} at t = (n+1) dt.
    The j = 0 term of the L1 convolution is the implicit (q_{n+1} - q_n)
    contribution absorbed into the denominator; the remaining history sum and
    the initial-value correction (dropped for the Caputo variant) enter the
    numerator. ``integrate`` applies the same update with a rolling history.
    """
    if params.variant is Variant.CLASSICAL_KV:
        raise ValueError("the closed-form step applies to the fractional variants")
    q = np.asarray(history, dtype=float)
    if q.ndim != 1 or q.size < 1:
        raise ValueError("history must hold at least the initial sample q_0")
    n = q.size - 1
    alpha = params.alpha.alpha
    a1 = 1.0 / (newmark.beta_nm * dt * dt)
    a2 = 1.0 / (newmark.beta_nm * dt)
    a3 = (1.0 - 2.0 * newmark.beta_nm) / (2.0 * newmark.beta_nm)
    e_star = params.e_r * params.c_l / (dt**alpha * gamma(2.0 - alpha))
    if n > 0:
        b = l1_weights(alpha, n + 1).b
        hist = float(np.dot(b[1:], np.diff(q)[::-1]))
    else:
        hist = 0.0
    rl_term = 0.0
    if params.variant is Variant.RIEMANN_LIOUVILLE:
        rl_term = q[0] * (1.0 - alpha) / (n + 1.0) ** alpha
    return (
        (a1 + e_star) * q[n]
        + a2 * qdot_n
        + a3 * qddot_n
        - params.m_b * base_accel_next
        - e_star * (hist + rl_term)
    ) / (a1 + e_star + params.k_l)


def _integrate_fractional(params, excitation, q0, qdot0, grid, nm):
    dt, n_steps = grid.dt, grid.n_steps
    alpha = params.alpha.alpha
    a1 = 1.0 / (nm.beta_nm * dt * dt)
    a2 = 1.0 / (nm.beta_nm * dt)
    a3 = (1.0 - 2.0 * nm.beta_nm) / (2.0 * nm.beta_nm)
    a4 = nm.gamma_nm / (nm.beta_nm * dt)
    a5 = 1.0 - nm.gamma_nm / nm.beta_nm
    a6 = (1.0 - nm.gamma_nm / (2.0 * nm.beta_nm)) * dt
    e_star = params.e_r * params.c_l / (dt**alpha * gamma(2.0 - alpha))

    b = l1_weights(alpha, n_steps).b
    br = b[::-1].copy()  # contiguous reversed weights for the history dot product
    nb = b.size

    q = np.empty(n_steps + 1)
    qd = np.empty(n_steps + 1)
    qdd = np.empty(n_steps + 1)
    d = np.empty(n_steps)
    q[0], qd[0] = q0, qdot0
    # Fractional damping vanishes at t = 0; the singular initial-value term
    # first enters at t_1.
    qdd[0] = -params.m_b * excitation.base_accel(0.0) - params.k_l * q0
    rl_coeff = (1.0 - alpha) * q0 if params.variant is Variant.RIEMANN_LIOUVILLE else 0.0
    den = a1 + e_star + params.k_l

    for n in range(n_steps):
        hist = np.dot(br[nb - 1 - n : nb - 1], d[:n]) if n > 0 else 0.0
        rl_term = rl_coeff / (n + 1.0) ** alpha if rl_coeff != 0.0 else 0.0
        qn = q[n]
        q_next = (
            (a1 + e_star) * qn
            + a2 * qd[n]
            + a3 * qdd[n]
            - params.m_b * excitation.base_accel((n + 1) * dt)
            - e_star * (hist + rl_term)
        ) / den
        if not math.isfinite(q_next):
            raise NumericalError(f"non-finite displacement at step {n + 1} (t={(n + 1) * dt:g})")
        qdd[n + 1] = a1 * (q_next - qn) - a2 * qd[n] - a3 * qdd[n]
        qd[n + 1] = a4 * (q_next - qn) + a5 * qd[n] + a6 * qdd[n]
        d[n] = q_next - qn
        q[n + 1] = q_next
    return q, qd, qdd


def _integrate_classical(params, excitation, q0, qdot0, grid, nm):
    dt, n_steps = grid.dt, grid.n_steps
    a1 = 1.0 / (nm.beta_nm * dt * dt)
    a2 = 1.0 / (nm.beta_nm * dt)
    a3 = (1.0 - 2.0 * nm.beta_nm) / (2.0 * nm.beta_nm)
    a4 = nm.gamma_nm / (nm.beta_nm * dt)
    a5 = 1.0 - nm.gamma_nm / nm.beta_nm
    a6 = (1.0 - nm.gamma_nm / (2.0 * nm.beta_nm)) * dt
    c = params.e_r * params.c_l

    q = np.empty(n_steps + 1)
    qd = np.empty(n_steps + 1)
    qdd = np.empty(n_steps + 1)
    q[0], qd[0] = q0, qdot0
    qdd[0] = -params.m_b * excitation.base_accel(0.0) - c * qdot0 - params.k_l * q0
    den = a1 + c * a4 + params.k_l

    for n in range(n_steps):
        qn = q[n]
        q_next = (
            -params.m_b * excitation.base_accel((n + 1) * dt)
            + (a1 + c * a4) * qn
            + (a2 - c * a5) * qd[n]
            + (a3 - c * a6) * qdd[n]
        ) / den
        if not math.isfinite(q_next):
            raise NumericalError(f"non-finite displacement at step {n + 1} (t={(n + 1) * dt:g})")
        qdd[n + 1] = a1 * (q_next - qn) - a2 * qd[n] - a3 * qdd[n]
        qd[n + 1] = a4 * (q_next - qn) + a5 * qd[n] + a6 * qdd[n]
        q[n + 1] = q_next
    return q, qd, qdd


def integrate(
    params: OscillatorParams,
    excitation: Excitation,
    q0: float,
    qdot0: float,
    grid: TimeGrid,
    newmark: NewmarkParams = NewmarkParams(),
) -> TrajectoryRecord:
    """Full trajectory of the oscillator from the given initial conditions.

    The initial acceleration is taken from the governing equation at t = 0
    with the fractional term zero there (for the Riemann-Liouville variant
    the singular correction is first evaluated at t_1 > 0).
    """
    if not (math.isfinite(q0) and math.isfinite(qdot0)):
        raise ValueError("initial conditions must be finite")
    if params.variant is Variant.CLASSICAL_KV:
        q, qd, qdd = _integrate_classical(params, excitation, q0, qdot0, grid, newmark)
    else:
        q, qd, qdd = _integrate_fractional(params, excitation, q0, qdot0, grid, newmark)
    for arr in (q, qd, qdd):
        arr.setflags(write=False)
    return TrajectoryRecord(grid, q, qd, qdd, params, excitation)


def steady_window_start(grid: TimeGrid, omega_b: float, window_fraction: float = 0.2) -> int:
    """First index of the steady-state window (the final ``window_fraction``
    of the run). The window must span at least one full forcing period."""
    if not 0.0 < window_fraction < 1.0:
        raise ValueError("window fraction must lie in (0, 1)")
    window = window_fraction * grid.t_end
    period = 2.0 * math.pi / omega_b
    if window < period:
        raise ValueError(
            f"steady window ({window:g}) shorter than one forcing period ({period:g}); "
            "extend the run or lower omega_b"
        )
    return int(math.floor((1.0 - window_fraction) * grid.n_steps))


def amplitude_sweep(
    params: OscillatorParams,
    omega_values,
    a_b: float,
    grid: TimeGrid,
    window_fraction: float = 0.2,
    workers: int = 1,
) -> np.ndarray:
    """Per-frequency maximum |q| over the steady-state window.

    Starts from homogeneous initial conditions at each frequency. Returns an
    (n, 2) array of (omega_b, amp_max) rows. Frequencies are independent, so
    they may be fanned out across threads.
    """
    omegas = [float(w) for w in omega_values]
    for w in omegas:
        steady_window_start(grid, w, window_fraction)  # validate up front

    def one(w: float) -> float:
        rec = integrate(params, Excitation.harmonic_base(a_b, w), 0.0, 0.0, grid)
        i0 = steady_window_start(grid, w, window_fraction)
        return float(np.max(np.abs(rec.q[i0:])))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            amps = list(pool.map(one, omegas))
    else:
        amps = [one(w) for w in omegas]
    out = np.column_stack([omegas, amps])
    out.setflags(write=False)
    return out


def forced_response_amplitude(params: OscillatorParams, a_b: float, omega_b: float) -> float:
    """Steady-state amplitude of the harmonically forced linear oscillator.

    Closed form obtained by inserting q = Q e^{i omega t} into the governing
    equation; for the classical variant the damping term is i omega E_r c_l.
    """
    w = float(omega_b)
    if not w > 0.0:
        raise ValueError(f"omega_b must be positive, got {w}")
    if params.variant is Variant.CLASSICAL_KV:
        re = params.k_l - w * w
        im = params.e_r * params.c_l * w
    else:
        a = params.alpha.alpha
        re = params.k_l - w * w + params.e_r * params.c_l * w**a * math.cos(a * math.pi / 2.0)
        im = params.e_r * params.c_l * w**a * math.sin(a * math.pi / 2.0)
    return abs(params.m_b) * a_b * w * w / math.hypot(re, im)
