"""Cantilever eigenproblem and modal coefficients of the single-mode reduction.

The beam is clamped at s = 0 and may carry a lumped mass (with rotary
inertia) at the free end s = 1. Solving the transcendental characteristic
equation gives the eigenvalue beta; the associated mode shape, normalized to
unit modal mass of the bare beam (integral of phi^2 over [0, 1] equal to 1),
feeds the quadratures that produce the reduced-model coefficients.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import NumericalError
from .fracops import FracOrder

__all__ = [
    "BeamConfig",
    "ModeShape",
    "ModalModel",
    "characteristic_residual",
    "solve_first_eigenvalue",
    "mode_shape",
    "modal_coefficients",
]

_QUAD_OPTS = dict(epsabs=1e-13, epsrel=1e-11, limit=200)


@dataclass(frozen=True)
class BeamConfig:
    """Dimensionless tip mass / rotary inertia and material ratio E_alpha/E_inf."""

    tip_mass: float = 0.0
    tip_inertia: float = 0.0
    modulus_ratio: float = 1.0
    alpha: FracOrder | None = None

    def __post_init__(self) -> None:
        if self.tip_mass < 0.0 or self.tip_inertia < 0.0:
            raise ValueError("tip mass and tip inertia must be non-negative")
        if not self.modulus_ratio > 0.0:
            raise ValueError(f"modulus ratio must be positive, got {self.modulus_ratio}")

    @classmethod
    def no_tip_mass(cls, modulus_ratio: float = 1.0, alpha: FracOrder | None = None) -> "BeamConfig":
        return cls(0.0, 0.0, modulus_ratio, alpha)

    @classmethod
    def with_tip_mass(cls, modulus_ratio: float = 1.0, alpha: FracOrder | None = None) -> "BeamConfig":
        return cls(1.0, 1.0, modulus_ratio, alpha)

    @property
    def has_tip_mass(self) -> bool:
        return self.tip_mass != 0.0 or self.tip_inertia != 0.0


def characteristic_residual(beta: float, config: BeamConfig) -> float:
    """Characteristic function whose positive roots are the beam eigenvalues.

    The two first-class configurations have dedicated closed forms:
    1 + cos(beta) cosh(beta) for the bare cantilever, and a fixed
    transcendental form for the tip-mass preset M = J = 1 (deliberately not
    the boundary-condition determinant; the preset's eigenvalue and mode
    shape are defined by this form). Any other (M, J) uses the
    boundary-condition determinant of the clamped/tip-loaded problem, scaled
    to match the bare case as M, J -> 0.
    """
    if not beta > 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    m, j = config.tip_mass, config.tip_inertia
    s, c = math.sin(beta), math.cos(beta)
    sh, ch = math.sinh(beta), math.cosh(beta)
    if m == 0.0 and j == 0.0:
        return 1.0 + c * ch
    if m == 1.0 and j == 1.0:
        return (
            -(1.0 + beta**4 + c * ch)
            + beta * (s * ch - c * sh)
            + beta**3 * (s * ch - sh * ch)
            + beta**4 * (s * sh + c * ch)
        )
    # rows of the 2x2 end-condition system for X = A (sin - sinh) + B (cos - cosh):
    # X''(1) = J beta^4 X'(1) and X'''(1) = -M beta^4 X(1)
    r11 = -(s + sh) - j * beta**3 * (c - ch)
    r12 = -(c + ch) + j * beta**3 * (s + sh)
    r21 = -(c + ch) + m * beta * (s - sh)
    r22 = (s - sh) + m * beta * (c - ch)
    return -0.5 * (r11 * r22 - r12 * r21)


def solve_first_eigenvalue(config: BeamConfig, beta_max: float = 20.0, scan_step: float = 0.05) -> float:
    """Smallest positive root of the characteristic equation.

    Scans (0, beta_max] for a sign change, then bisects. Raises
    NumericalError when no bracket is found or the refined root fails the
    residual tolerance.
    """
    f = lambda b: characteristic_residual(b, config)
    lo = scan_step
    flo = f(lo)
    b = lo
    while b < beta_max:
        b_next = b + scan_step
        f_next = f(b_next)
        if flo == 0.0:
            root = b
            break
        if flo * f_next < 0.0:
            root = brentq(f, b, b_next, xtol=1e-14, rtol=8.9e-16)
            break
        b, flo = b_next, f_next
    else:
        raise NumericalError(f"no eigenvalue bracket found in (0, {beta_max}] for {config}")
    if abs(f(root)) > 1e-10 * max(1.0, abs(root) ** 4):
        raise NumericalError(f"eigenvalue residual too large at beta={root!r}")
    return float(root)


@dataclass(frozen=True)
class ModeShape:
    """Closed-form mode phi(s) = cs*sin + cc*cos + csh*sinh + cch*cosh of argument beta*s.

    Clamped-end conditions phi(0) = phi'(0) = 0 are enforced on construction.
    """

    beta: float
    coeff_sin: float
    coeff_cos: float
    coeff_sinh: float
    coeff_cosh: float

    def __post_init__(self) -> None:
        if not self.beta > 0.0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        scale = max(abs(self.coeff_sin), abs(self.coeff_cos), abs(self.coeff_sinh), abs(self.coeff_cosh), 1.0)
        if abs(self.coeff_sin + self.coeff_sinh) > 1e-12 * scale or abs(self.coeff_cos + self.coeff_cosh) > 1e-12 * scale:
            raise ValueError("coefficients violate the clamped-end conditions phi(0) = phi'(0) = 0")

    def value(self, s):
        bs = self.beta * np.asarray(s, dtype=float)
        return (
            self.coeff_sin * np.sin(bs)
            + self.coeff_cos * np.cos(bs)
            + self.coeff_sinh * np.sinh(bs)
            + self.coeff_cosh * np.cosh(bs)
        )

    def slope(self, s):
        bs = self.beta * np.asarray(s, dtype=float)
        return self.beta * (
            self.coeff_sin * np.cos(bs)
            - self.coeff_cos * np.sin(bs)
            + self.coeff_sinh * np.cosh(bs)
            + self.coeff_cosh * np.sinh(bs)
        )

    def curvature(self, s):
        bs = self.beta * np.asarray(s, dtype=float)
        return self.beta**2 * (
            -self.coeff_sin * np.sin(bs)
            - self.coeff_cos * np.cos(bs)
            + self.coeff_sinh * np.sinh(bs)
            + self.coeff_cosh * np.cosh(bs)
        )

    def scaled(self, factor: float) -> "ModeShape":
        """Same shape under a different normalization convention."""
        return ModeShape(
            self.beta,
            factor * self.coeff_sin,
            factor * self.coeff_cos,
            factor * self.coeff_sinh,
            factor * self.coeff_cosh,
        )


def _quad(f, what: str) -> float:
    val, err, info = quad(f, 0.0, 1.0, full_output=True, **_QUAD_OPTS)[:3]
    if err > max(1e-10 * abs(val), 1e-11):
        raise NumericalError(f"quadrature for {what} did not reach tolerance (err={err:g})")
    return val


def mode_shape(config: BeamConfig, beta: float) -> ModeShape:
    """First-mode shape for the given eigenvalue, normalized so that the
    integral of phi^2 over [0, 1] is 1 and the sin coefficient is positive.

    The (M, J) = (1, 1) preset uses its own coefficient ratio (the companion
    of its characteristic form); other configurations use the moment end
    condition X''(1) = J beta^4 X'(1).
    """
    if not beta > 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    m, j = config.tip_mass, config.tip_inertia
    s, c = math.sin(beta), math.cos(beta)
    sh, ch = math.sinh(beta), math.cosh(beta)
    if m == 1.0 and j == 1.0:
        ratio = (s + sh + beta**3 * (c - ch)) / (c + ch - beta**3 * (s - sh))
    else:
        ratio = (s + sh + j * beta**3 * (c - ch)) / (c + ch - j * beta**3 * (s + sh))
    raw = ModeShape(beta, 1.0, -ratio, -1.0, ratio)
    norm = _quad(lambda x: raw.value(x) ** 2, "mode normalization")
    return raw.scaled(1.0 / math.sqrt(norm))


@dataclass(frozen=True)
class ModalModel:
    """Coefficients of the unimodal reduced equation of motion.

    mass:       phi^2 integral plus M phi(1)^2 + J phi'(1)^2
    inertia_nl: J phi'(1)^4 (cubic inertia coupling)
    k_lin/c_lin:     integral of phi''^2 (identical by construction)
    k_nl/c_nl:       integral of phi'^2 phi''^2 (identical by construction)
    m_base:     phi integral plus M phi(1) (base-excitation projection)
    omega0:     sqrt(k_lin / mass)
    """

    mode: ModeShape
    omega0: float
    mass: float
    inertia_nl: float
    k_lin: float
    c_lin: float
    k_nl: float
    c_nl: float
    m_base: float

    def __post_init__(self) -> None:
        if not (self.mass > 0.0 and self.k_lin > 0.0 and self.k_nl > 0.0):
            raise ValueError("mass, k_lin and k_nl must be strictly positive")
        if self.k_lin != self.c_lin or self.k_nl != self.c_nl:
            raise ValueError("k_lin/c_lin and k_nl/c_nl must be identical")

    _FIELDS = ("omega0", "mass", "inertia_nl", "k_lin", "c_lin", "k_nl", "c_nl", "m_base")

    def to_json(self) -> str:
        d = {name: getattr(self, name) for name in self._FIELDS}
        d["mode"] = {
            "beta": self.mode.beta,
            "coeff_sin": self.mode.coeff_sin,
            "coeff_cos": self.mode.coeff_cos,
            "coeff_sinh": self.mode.coeff_sinh,
            "coeff_cosh": self.mode.coeff_cosh,
        }
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ModalModel":
        d = json.loads(text)
        mode = ModeShape(**d.pop("mode"))
        return cls(mode=mode, **d)


def modal_coefficients(config: BeamConfig, mode: ModeShape) -> ModalModel:
    """Adaptive-quadrature evaluation of the reduced-model coefficients.

    Derivatives of the mode are analytic closed forms, never finite
    differences; quadrature is carried to 1e-10 relative tolerance.
    """
    m, j = config.tip_mass, config.tip_inertia
    phi1 = float(mode.value(1.0))
    dphi1 = float(mode.slope(1.0))

    i_phi2 = _quad(lambda x: mode.value(x) ** 2, "phi^2")
    i_phi = _quad(mode.value, "phi")
    i_curv2 = _quad(lambda x: mode.curvature(x) ** 2, "phi''^2")
    i_mixed = _quad(lambda x: (mode.slope(x) * mode.curvature(x)) ** 2, "phi'^2 phi''^2")

    mass = i_phi2 + m * phi1**2 + j * dphi1**2
    k_lin = i_curv2
    k_nl = i_mixed
    return ModalModel(
        mode=mode,
        omega0=math.sqrt(k_lin / mass),
        mass=mass,
        inertia_nl=j * dphi1**4,
        k_lin=k_lin,
        c_lin=k_lin,
        k_nl=k_nl,
        c_nl=k_nl,
        m_base=i_phi + m * phi1,
    )


def build_modal_model(config: BeamConfig) -> ModalModel:
    """Eigen-solve, mode construction and quadrature in one call."""
    beta = solve_first_eigenvalue(config)
    return modal_coefficients(config, mode_shape(config, beta))
