"""Fractional Kelvin-Voigt cantilever dynamics.

Modules
-------
fracops:    L1 discretization of Caputo/Riemann-Liouville derivatives.
beammodel:  cantilever eigenproblem and modal reduction coefficients.
lintegrate: direct time integration of the linearized fractional oscillator.
mms:        multiple-scales slow flow, sensitivity and resonance cubic.
rheology:   Kelvin-Voigt moduli, tangent loss and stress programs.
cli:        experiment driver (`fracbeam` console script).
"""

__version__ = "0.1.0"

from .beammodel import (
    BeamConfig,
    ModalModel,
    ModeShape,
    build_modal_model,
    characteristic_residual,
    modal_coefficients,
    mode_shape,
    solve_first_eigenvalue,
)
from .errors import NumericalError
from .fracops import (
    FracOrder,
    L1Weights,
    TimeGrid,
    caputo_l1,
    caputo_l1_series,
    frac_deriv_monomial,
    gamma,
    l1_weights,
    rl_from_caputo,
)
from .lintegrate import (
    Excitation,
    NewmarkParams,
    OscillatorParams,
    TrajectoryRecord,
    Variant,
    amplitude_sweep,
    forced_response_amplitude,
    integrate,
    step_closed_form,
)
from .mms import (
    ScaledCoeffs,
    SlowFlowState,
    Stability,
    SteadyRoot,
    SteadyStateCubic,
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
from .rheology import (
    KelvinVoigtParams,
    MaterialDistribution,
    StrainPiece,
    StrainProgram,
    UnsupportedDistributionError,
    complex_modulus,
    maxwell_ramp_stress,
    reduce_to_kelvin_voigt,
    stress_response,
    tangent_loss,
)

__all__ = [name for name in dir() if not name.startswith("_")]
