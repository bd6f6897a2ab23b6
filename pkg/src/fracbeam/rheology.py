"""Fractional Kelvin-Voigt constitutive toolkit.

Reduction of distributed-order material laws to the Kelvin-Voigt form
sigma = E_inf eps + E_alpha D^alpha eps, frequency-domain storage/loss
moduli and tangent loss, and time-domain stress response under piecewise
strain programs discretized with the L1 scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fracops import FracOrder, TimeGrid, as_order, caputo_l1_series

__all__ = [
    "MaterialDistribution",
    "KelvinVoigtParams",
    "StrainPiece",
    "StrainProgram",
    "UnsupportedDistributionError",
    "reduce_to_kelvin_voigt",
    "complex_modulus",
    "tangent_loss",
    "stress_response",
    "maxwell_ramp_stress",
]

_ATOM_TOL = 1e-12


class UnsupportedDistributionError(ValueError):
    """The material distribution does not match a supported discrete pattern."""


@dataclass(frozen=True)
class MaterialDistribution:
    """Discrete (delta-function) order distributions on the stress and strain sides.

    Atoms are (order, weight) pairs with orders in [0, 1]; ``elastic_weight``
    is the weight of the order-zero strain atom (a strain atom listed with
    order 0 is folded into it on reduction).
    """

    stress_atoms: tuple[tuple[float, float], ...]
    strain_atoms: tuple[tuple[float, float], ...]
    elastic_weight: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "stress_atoms", tuple((float(o), float(w)) for o, w in self.stress_atoms))
        object.__setattr__(self, "strain_atoms", tuple((float(o), float(w)) for o, w in self.strain_atoms))
        for order, _ in self.stress_atoms + self.strain_atoms:
            if not 0.0 <= order <= 1.0:
                raise ValueError(f"distribution orders must lie in [0, 1], got {order}")


@dataclass(frozen=True)
class KelvinVoigtParams:
    """Spring of modulus e_inf in parallel with a fractional element e_alpha D^alpha."""

    e_inf: float
    e_alpha: float
    alpha: FracOrder

    def __post_init__(self) -> None:
        if not self.e_inf > 0.0:
            raise ValueError(f"e_inf must be positive, got {self.e_inf}")
        if self.e_alpha < 0.0:
            raise ValueError(f"e_alpha must be non-negative, got {self.e_alpha}")
        object.__setattr__(self, "alpha", as_order(self.alpha))

    @property
    def e_r(self) -> float:
        return self.e_alpha / self.e_inf


def reduce_to_kelvin_voigt(dist: MaterialDistribution) -> KelvinVoigtParams:
    """Extract (E_inf, E_alpha, alpha) from the Kelvin-Voigt atom pattern.

    Requires a single unit-weight order-zero stress atom and exactly one
    strain atom of order strictly inside (0, 1); anything else (general
    distributed-order laws included) is rejected.
    """
    if len(dist.stress_atoms) != 1:
        raise UnsupportedDistributionError("expected exactly one stress atom of order zero")
    s_order, s_weight = dist.stress_atoms[0]
    if abs(s_order) > _ATOM_TOL or abs(s_weight - 1.0) > _ATOM_TOL:
        raise UnsupportedDistributionError("stress side must be a unit-weight atom at order zero")

    e_inf = dist.elastic_weight
    fractional: list[tuple[float, float]] = []
    for order, weight in dist.strain_atoms:
        if abs(order) <= _ATOM_TOL:
            e_inf += weight
        else:
            fractional.append((order, weight))
    if len(fractional) != 1:
        raise UnsupportedDistributionError(
            f"expected exactly one fractional strain atom, found {len(fractional)}"
        )
    order, weight = fractional[0]
    if not 0.0 < order < 1.0:
        raise UnsupportedDistributionError(f"fractional order must lie in (0, 1), got {order}")
    if weight < 0.0:
        raise UnsupportedDistributionError(f"fractional weight must be non-negative, got {weight}")
    return KelvinVoigtParams(e_inf=e_inf, e_alpha=weight, alpha=FracOrder(order))


def complex_modulus(params: KelvinVoigtParams, omega):
    """Storage and loss moduli (G', G'') at circular frequency omega > 0."""
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0.0):
        raise ValueError("omega must be positive")
    a = params.alpha.alpha
    wa = w**a
    storage = params.e_inf + params.e_alpha * wa * math.cos(a * math.pi / 2.0)
    loss = params.e_alpha * wa * math.sin(a * math.pi / 2.0)
    if np.isscalar(omega) or np.ndim(omega) == 0:
        return float(storage), float(loss)
    return storage, loss


def tangent_loss(params: KelvinVoigtParams, omega):
    """Loss-to-storage ratio E_r w^a sin(a pi/2) / (1 + E_r w^a cos(a pi/2))."""
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0.0):
        raise ValueError("omega must be positive")
    a = params.alpha.alpha
    wa = w**a
    e_r = params.e_r
    den = 1.0 + e_r * wa * math.cos(a * math.pi / 2.0)
    # cos(a pi/2) > 0 on (0, 1), so the denominator cannot vanish
    assert np.all(den > 0.0)
    out = e_r * wa * math.sin(a * math.pi / 2.0) / den
    if np.isscalar(omega) or np.ndim(omega) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class StrainPiece:
    """One segment of a piecewise strain program.

    kind "ramp": strain grows at ``value`` per unit time from the running level.
    kind "hold": strain stays at ``value`` (must match the running level).
    """

    t_start: float
    t_end: float
    kind: str
    value: float

    def __post_init__(self) -> None:
        if self.kind not in ("ramp", "hold"):
            raise ValueError(f"unknown piece kind {self.kind!r}")
        if not self.t_end > self.t_start:
            raise ValueError("piece must have t_end > t_start")


@dataclass(frozen=True)
class StrainProgram:
    """Contiguous strain pieces starting at t = 0 with continuous strain.

    Strain starts at zero; a hold whose level disagrees with the running
    value would introduce a jump the L1 history cannot represent and is
    rejected.
    """

    pieces: tuple[StrainPiece, ...]

    def __post_init__(self) -> None:
        if not self.pieces:
            raise ValueError("program needs at least one piece")
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if abs(self.pieces[0].t_start) > _ATOM_TOL:
            raise ValueError("program must start at t = 0")
        levels = []
        level = 0.0
        prev_end = self.pieces[0].t_start
        for piece in self.pieces:
            if abs(piece.t_start - prev_end) > _ATOM_TOL:
                raise ValueError("pieces must be contiguous")
            if piece.kind == "hold" and abs(piece.value - level) > 1e-9 * max(1.0, abs(level)):
                raise ValueError(
                    f"discontinuous strain program: hold at {piece.value!r} after level {level!r}"
                )
            levels.append(level)
            if piece.kind == "ramp":
                level += piece.value * (piece.t_end - piece.t_start)
            else:
                level = piece.value
            prev_end = piece.t_end
        object.__setattr__(self, "_start_levels", tuple(levels))

    @classmethod
    def ramp_then_hold(cls, rate: float, t_switch: float, t_end: float) -> "StrainProgram":
        """Constant-rate loading followed by a hold at the reached strain."""
        reached = rate * t_switch
        return cls(
            (
                StrainPiece(0.0, t_switch, "ramp", rate),
                StrainPiece(t_switch, t_end, "hold", reached),
            )
        )

    @property
    def t_end(self) -> float:
        return self.pieces[-1].t_end

    def value(self, t):
        """Strain evaluated analytically at the given times."""
        tt = np.asarray(t, dtype=float)
        if np.any(tt < -_ATOM_TOL) or np.any(tt > self.t_end + _ATOM_TOL):
            raise ValueError("time outside the program span")
        starts = np.array([p.t_start for p in self.pieces])
        idx = np.clip(np.searchsorted(starts, tt, side="right") - 1, 0, len(self.pieces) - 1)
        out = np.empty(tt.shape)
        for i, piece in enumerate(self.pieces):
            sel = idx == i
            if not np.any(sel):
                continue
            if piece.kind == "ramp":
                out[sel] = self._start_levels[i] + piece.value * (tt[sel] - piece.t_start)
            else:
                out[sel] = piece.value
        if np.ndim(t) == 0:
            return float(out)
        return out


def stress_response(params: KelvinVoigtParams, program: StrainProgram, grid: TimeGrid) -> np.ndarray:
    """Stress at every grid node: E_inf eps + E_alpha * (L1 Caputo of eps).

    The strain history starts from zero, so the Riemann-Liouville and Caputo
    derivatives coincide and the L1 evaluation serves both.
    """
    if program.t_end < grid.t_end - 1e-9 * grid.dt:
        raise ValueError("strain program must cover the whole time grid")
    eps = np.asarray(program.value(grid.times()))
    sigma = params.e_inf * eps
    if params.e_alpha != 0.0:
        sigma = sigma + params.e_alpha * caputo_l1_series(eps, grid, params.alpha)
    sigma.setflags(write=False)
    return sigma


def maxwell_ramp_stress(modulus: float, relaxation_time: float, rate: float, t):
    """Single-branch exponential-kernel response to a constant-rate ramp.

    sigma(t) = E r tau (1 - exp(-t / tau)); the classical contrast to the
    power-law stress growth of the fractional element.
    """
    tt = np.asarray(t, dtype=float)
    out = modulus * rate * relaxation_time * (1.0 - np.exp(-tt / relaxation_time))
    if np.ndim(t) == 0:
        return float(out)
    return out
