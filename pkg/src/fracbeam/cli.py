"""Experiment command-line driver with reproducible CSV/JSON outputs.

Each subcommand runs one named experiment with built-in presets; values from
``--config`` (TOML or JSON) override the presets, and explicit flags override
both. Data files are deterministic: identical resolved configs produce
byte-identical bytes. A manifest JSON next to each output records the
resolved config, package version and wall time (the manifest itself carries
the timing and is the one file excluded from byte-identity).

Exit codes: 0 success, 2 validation failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from .beammodel import BeamConfig, build_modal_model
from .dataio import (
    write_bifurcation_json,
    write_csv,
    write_json,
    write_moduli_json,
    write_response_csv,
    write_stress_csv,
    write_sweep_csv,
    write_trajectory_csv,
)
from .errors import NumericalError
from .fracops import FracOrder, TimeGrid
from .lintegrate import Excitation, OscillatorParams, Variant, amplitude_sweep, integrate
from .mms import frequency_response, integrate_slow_flow, scale_coeffs, three_root_interval
from .rheology import KelvinVoigtParams, StrainProgram, complex_modulus, stress_response, tangent_loss

CASES = {
    "no-tip-mass": (0.0, 0.0),
    "tip-mass": (1.0, 1.0),
}

VARIANTS = {
    "rl": Variant.RIEMANN_LIOUVILLE,
    "riemann-liouville": Variant.RIEMANN_LIOUVILLE,
    "caputo": Variant.CAPUTO,
    "classical": Variant.CLASSICAL_KV,
    "classical-kv": Variant.CLASSICAL_KV,
}

PRESETS: dict[str, dict] = {
    "eig": {"case": "no-tip-mass"},
    "forced-sweep": {
        "case": "tip-mass",
        "alpha": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
        "er": 1.0,
        "a_b": 0.01,
        "omega_lo": 0.5,
        "omega_hi": 3.5,
        "omega_n": 21,
        "dt": 1e-3,
        "t_end": 100.0,
        "variant": "rl",
        "workers": 1,
    },
    "free-vib": {
        "case": "tip-mass",
        "alpha": [0.1, 0.3, 0.5, 0.7, 0.9],
        "er": 1.0,
        "q0": 0.01,
        "qdot0": 0.0,
        "dt": 1e-3,
        "t_end": 100.0,
        "variant": "rl",
        "stride": 1,
    },
    "mms-free": {
        "case": "no-tip-mass",
        "alpha": [0.1, 0.3, 0.5, 0.7, 0.9],
        "er": 0.1,
        "a0": 1.0,
        "t1_end": 20.0,
        "dt1": 1e-3,
    },
    "resonance": {
        "case": "no-tip-mass",
        "alpha": [0.4],
        "er": [0.3],
        "f": 1.0,
        "delta_lo": -2.0,
        "delta_hi": 8.0,
        "delta_n": 401,
    },
    "bifurcation": {
        "case": "no-tip-mass",
        "alpha": [0.1, 0.2, 0.3],
        "er": 0.3,
        "f": 1.0,
        "scan_points": 2001,
    },
    "moduli": {
        "case": "no-tip-mass",
        "alpha": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
        "e_inf": 1.0,
        "e_alpha": 1.0,
        "omega": None,  # None: use omega0 of the selected case
    },
    "stress": {
        "alpha": [0.3, 0.5, 0.7],
        "e_inf": 1.0,
        "e_alpha": 1.0,
        "rate": 1.0 / 24.0,
        "t_switch": 2.5,
        "t_end": 6.0,
        "dt": 1e-3,
        "stride": 1,
    },
}

PRESET_LABELS = {
    "eig": "first-mode-eigensolve",
    "forced-sweep": "tip-mass-base-excitation-sweep",
    "free-vib": "tip-mass-free-vibration",
    "mms-free": "slow-flow-free-vibration",
    "resonance": "primary-resonance-response",
    "bifurcation": "primary-resonance-three-root-intervals",
    "moduli": "kelvin-voigt-moduli",
    "stress": "ramp-hold-stress-relaxation",
}


def _parse_float_list(name: str, value) -> list[float]:
    if isinstance(value, str):
        try:
            values = [float(tok) for tok in value.split(",") if tok.strip()]
        except ValueError as exc:
            raise ValueError(f"{name}: could not parse {value!r}") from exc
    elif isinstance(value, (list, tuple)):
        values = [float(v) for v in value]
    else:
        values = [float(value)]
    if not values:
        raise ValueError(f"{name}: list must not be empty")
    return values


def _load_config_file(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise ValueError(f"config: file not found: {path}")
    if p.suffix.lower() == ".json":
        return json.loads(p.read_text(encoding="utf-8"))
    with p.open("rb") as fh:
        return tomllib.load(fh)


def _resolve(experiment: str, args: argparse.Namespace) -> dict:
    cfg = dict(PRESETS[experiment])
    if getattr(args, "config", None):
        file_cfg = _load_config_file(args.config)
        stated = file_cfg.pop("experiment", experiment)
        if stated != experiment:
            raise ValueError(f"config: file is for experiment {stated!r}, not {experiment!r}")
        unknown = set(file_cfg) - set(cfg) - {"out"}
        if unknown:
            raise ValueError(f"config: unknown fields {sorted(unknown)}")
        cfg.update(file_cfg)
    for key in cfg:
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            cfg[key] = flag_val
    cfg["out"] = getattr(args, "out", None) or cfg.get("out")
    if "alpha" in cfg:
        cfg["alpha"] = _parse_float_list("alpha", cfg["alpha"])
    return cfg


def _validate_alphas(cfg: dict) -> list[FracOrder]:
    try:
        return [FracOrder(a) for a in cfg["alpha"]]
    except ValueError as exc:
        raise ValueError(f"alpha: {exc}") from exc


def _positive(cfg: dict, *keys: str) -> None:
    for key in keys:
        if not float(cfg[key]) > 0.0:
            raise ValueError(f"{key}: must be positive, got {cfg[key]}")


def _beam_config(cfg: dict) -> BeamConfig:
    case = cfg["case"]
    if case not in CASES:
        raise ValueError(f"case: must be one of {sorted(CASES)}, got {case!r}")
    m, j = CASES[case]
    return BeamConfig(m, j)


def _variant(cfg: dict) -> Variant:
    name = cfg["variant"]
    if name not in VARIANTS:
        raise ValueError(f"variant: must be one of {sorted(VARIANTS)}, got {name!r}")
    return VARIANTS[name]


def _out_stem(cfg: dict, required: bool = True) -> Path | None:
    out = cfg.get("out")
    if out is None:
        if required:
            raise ValueError("out: an output path is required for this experiment")
        return None
    return Path(out)


def _alpha_tag(alpha: FracOrder) -> str:
    return format(alpha.alpha, "g").replace(".", "p")


def _write_manifest(experiment: str, cfg: dict, outputs: list[str], wall: float) -> None:
    manifest = {
        "experiment": experiment,
        "preset": PRESET_LABELS[experiment],
        "config": {k: v for k, v in cfg.items() if k != "out"},
        "package_version": __version__,
        "wall_time_s": wall,
        "outputs": outputs,
    }
    write_json(Path(str(cfg["out"]) + ".manifest.json"), manifest)


def run_eig(cfg: dict) -> list[str]:
    model = build_modal_model(_beam_config(cfg))
    payload = {
        "case": cfg["case"],
        "beta": model.mode.beta,
        "beta_sq": model.mode.beta**2,
        "omega0": model.omega0,
        "mass": model.mass,
        "inertia_nl": model.inertia_nl,
        "k_lin": model.k_lin,
        "c_lin": model.c_lin,
        "k_nl": model.k_nl,
        "c_nl": model.c_nl,
        "m_base": model.m_base,
        "mode": {
            "coeff_sin": model.mode.coeff_sin,
            "coeff_cos": model.mode.coeff_cos,
            "coeff_sinh": model.mode.coeff_sinh,
            "coeff_cosh": model.mode.coeff_cosh,
        },
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    stem = _out_stem(cfg, required=False)
    if stem is None:
        return []
    write_json(stem, payload)
    return [str(stem)]


def run_forced_sweep(cfg: dict) -> list[str]:
    alphas = _validate_alphas(cfg)
    _positive(cfg, "er", "a_b", "omega_lo", "omega_hi", "dt", "t_end")
    if cfg["omega_n"] < 1:
        raise ValueError("omega_n: need at least one sweep frequency")
    model = build_modal_model(_beam_config(cfg))
    variant = _variant(cfg)
    if variant is Variant.CLASSICAL_KV:
        raise ValueError("variant: the forced sweep drives the fractional oscillator; use rl or caputo")
    grid = TimeGrid.from_span(cfg["dt"], cfg["t_end"])
    omegas = np.linspace(cfg["omega_lo"], cfg["omega_hi"], int(cfg["omega_n"]))
    stem = _out_stem(cfg)
    outputs = []
    for alpha in alphas:
        params = OscillatorParams.from_modal_model(model, cfg["er"], alpha, variant)
        sweep = amplitude_sweep(params, omegas, cfg["a_b"], grid, workers=int(cfg["workers"]))
        path = stem.with_name(f"{stem.stem}_alpha{_alpha_tag(alpha)}{stem.suffix or '.csv'}")
        write_sweep_csv(path, sweep)
        outputs.append(str(path))
    return outputs


def run_free_vib(cfg: dict) -> list[str]:
    alphas = _validate_alphas(cfg)
    _positive(cfg, "er", "dt", "t_end")
    model = build_modal_model(_beam_config(cfg))
    variant = _variant(cfg)
    grid = TimeGrid.from_span(cfg["dt"], cfg["t_end"])
    stem = _out_stem(cfg)
    outputs = []
    for alpha in alphas:
        params = OscillatorParams.from_modal_model(model, cfg["er"], alpha, variant)
        record = integrate(params, Excitation.free(), cfg["q0"], cfg["qdot0"], grid)
        path = stem.with_name(f"{stem.stem}_alpha{_alpha_tag(alpha)}{stem.suffix or '.csv'}")
        write_trajectory_csv(record, path, stride=int(cfg["stride"]))
        outputs.append(str(path))
    return outputs


def run_mms_free(cfg: dict) -> list[str]:
    alphas = _validate_alphas(cfg)
    _positive(cfg, "er", "t1_end", "dt1")
    if cfg["a0"] < 0.0:
        raise ValueError(f"a0: must be non-negative, got {cfg['a0']}")
    model = build_modal_model(_beam_config(cfg))
    stem = _out_stem(cfg)
    outputs = []
    for alpha in alphas:
        coeffs = scale_coeffs(model, cfg["er"], alpha)
        t1, a, phi = integrate_slow_flow(coeffs, cfg["a0"], 0.0, cfg["t1_end"], cfg["dt1"])
        path = stem.with_name(f"{stem.stem}_alpha{_alpha_tag(alpha)}{stem.suffix or '.csv'}")
        write_csv(path, ("T1", "a", "phi"), zip(t1, a, phi))
        outputs.append(str(path))
    return outputs


def run_resonance(cfg: dict) -> list[str]:
    alphas = _validate_alphas(cfg)
    ers = _parse_float_list("er", cfg["er"])
    if any(e <= 0.0 for e in ers):
        raise ValueError(f"er: all values must be positive, got {ers}")
    if cfg["f"] < 0.0:
        raise ValueError(f"f: must be non-negative, got {cfg['f']}")
    if cfg["delta_n"] < 2 or cfg["delta_hi"] <= cfg["delta_lo"]:
        raise ValueError("delta range: need delta_lo < delta_hi and delta_n >= 2")
    model = build_modal_model(_beam_config(cfg))
    deltas = np.linspace(cfg["delta_lo"], cfg["delta_hi"], int(cfg["delta_n"]))
    stem = _out_stem(cfg)
    outputs = []
    for alpha in alphas:
        for er in ers:
            coeffs = scale_coeffs(model, er, alpha)
            response = frequency_response(coeffs, deltas, cfg["f"])
            tag = f"alpha{_alpha_tag(alpha)}_er{format(er, 'g').replace('.', 'p')}"
            path = stem.with_name(f"{stem.stem}_{tag}{stem.suffix or '.csv'}")
            write_response_csv(path, response)
            outputs.append(str(path))
    return outputs


def run_bifurcation(cfg: dict) -> list[str]:
    alphas = _validate_alphas(cfg)
    _positive(cfg, "er", "f")
    if cfg["scan_points"] < 3:
        raise ValueError("scan_points: need at least 3")
    model = build_modal_model(_beam_config(cfg))
    entries = []
    for alpha in alphas:
        coeffs = scale_coeffs(model, cfg["er"], alpha)
        interval = three_root_interval(coeffs, cfg["f"], scan_points=int(cfg["scan_points"]))
        entries.append(
            {
                "alpha": alpha.alpha,
                "delta_lo": None if interval is None else interval[0],
                "delta_hi": None if interval is None else interval[1],
            }
        )
    print(json.dumps(entries, indent=2, sort_keys=True))
    stem = _out_stem(cfg, required=False)
    if stem is None:
        return []
    write_bifurcation_json(stem, entries)
    return [str(stem)]


def run_moduli(cfg: dict) -> list[str]:
    alphas = _validate_alphas(cfg)
    _positive(cfg, "e_inf")
    if cfg["e_alpha"] < 0.0:
        raise ValueError(f"e_alpha: must be non-negative, got {cfg['e_alpha']}")
    omega = cfg["omega"]
    if omega is None:
        omega = build_modal_model(_beam_config(cfg)).omega0
    if not omega > 0.0:
        raise ValueError(f"omega: must be positive, got {omega}")
    rows = []
    for alpha in alphas:
        params = KelvinVoigtParams(cfg["e_inf"], cfg["e_alpha"], alpha)
        g1, g2 = complex_modulus(params, omega)
        rows.append(
            {
                "alpha": alpha.alpha,
                "omega": float(omega),
                "G1": g1,
                "G2": g2,
                "tan_loss": tangent_loss(params, omega),
            }
        )
    print(json.dumps(rows, indent=2, sort_keys=True))
    stem = _out_stem(cfg, required=False)
    if stem is None:
        return []
    write_moduli_json(stem, rows)
    return [str(stem)]


def run_stress(cfg: dict) -> list[str]:
    alphas = _validate_alphas(cfg)
    _positive(cfg, "e_inf", "rate", "t_switch", "t_end", "dt")
    if cfg["e_alpha"] < 0.0:
        raise ValueError(f"e_alpha: must be non-negative, got {cfg['e_alpha']}")
    if cfg["t_switch"] >= cfg["t_end"]:
        raise ValueError("t_switch: must lie before t_end")
    program = StrainProgram.ramp_then_hold(cfg["rate"], cfg["t_switch"], cfg["t_end"])
    grid = TimeGrid.from_span(cfg["dt"], cfg["t_end"])
    t = grid.times()
    strain = np.asarray(program.value(t))
    stem = _out_stem(cfg)
    stride = int(cfg["stride"])
    outputs = []
    for alpha in alphas:
        params = KelvinVoigtParams(cfg["e_inf"], cfg["e_alpha"], alpha)
        sigma = stress_response(params, program, grid)
        path = stem.with_name(f"{stem.stem}_alpha{_alpha_tag(alpha)}{stem.suffix or '.csv'}")
        write_stress_csv(path, t[::stride], strain[::stride], sigma[::stride])
        outputs.append(str(path))
    return outputs


HANDLERS = {
    "eig": run_eig,
    "forced-sweep": run_forced_sweep,
    "free-vib": run_free_vib,
    "mms-free": run_mms_free,
    "resonance": run_resonance,
    "bifurcation": run_bifurcation,
    "moduli": run_moduli,
    "stress": run_stress,
}


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="TOML or JSON file with experiment fields")
    sub.add_argument("--out", help="output path (base name for per-alpha files)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracbeam", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="experiment", required=True)

    p = subs.add_parser("eig", help="first eigenvalue, mode shape and modal coefficients")
    _add_common(p)
    p.add_argument("--case", choices=sorted(CASES))

    p = subs.add_parser("forced-sweep", help="steady-state amplitude vs base frequency")
    _add_common(p)
    p.add_argument("--case", choices=sorted(CASES))
    p.add_argument("--alpha", help="comma-separated fractional orders")
    p.add_argument("--er", type=float)
    p.add_argument("--a-b", dest="a_b", type=float)
    p.add_argument("--omega-lo", dest="omega_lo", type=float)
    p.add_argument("--omega-hi", dest="omega_hi", type=float)
    p.add_argument("--omega-n", dest="omega_n", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--variant", choices=sorted(VARIANTS))
    p.add_argument("--workers", type=int)

    p = subs.add_parser("free-vib", help="free-vibration trajectory")
    _add_common(p)
    p.add_argument("--case", choices=sorted(CASES))
    p.add_argument("--alpha", help="comma-separated fractional orders")
    p.add_argument("--er", type=float)
    p.add_argument("--q0", type=float)
    p.add_argument("--qdot0", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--variant", choices=sorted(VARIANTS))
    p.add_argument("--stride", type=int)

    p = subs.add_parser("mms-free", help="slow-flow amplitude and phase trajectories")
    _add_common(p)
    p.add_argument("--case", choices=sorted(CASES))
    p.add_argument("--alpha", help="comma-separated fractional orders")
    p.add_argument("--er", type=float)
    p.add_argument("--a0", type=float)
    p.add_argument("--t1-end", dest="t1_end", type=float)
    p.add_argument("--dt1", type=float)

    p = subs.add_parser("resonance", help="steady amplitudes vs detuning with stability")
    _add_common(p)
    p.add_argument("--case", choices=sorted(CASES))
    p.add_argument("--alpha", help="comma-separated fractional orders")
    p.add_argument("--er", help="comma-separated modulus ratios")
    p.add_argument("--f", type=float)
    p.add_argument("--delta-lo", dest="delta_lo", type=float)
    p.add_argument("--delta-hi", dest="delta_hi", type=float)
    p.add_argument("--delta-n", dest="delta_n", type=int)

    p = subs.add_parser("bifurcation", help="three-root detuning intervals per alpha")
    _add_common(p)
    p.add_argument("--case", choices=sorted(CASES))
    p.add_argument("--alpha", help="comma-separated fractional orders")
    p.add_argument("--er", type=float)
    p.add_argument("--f", type=float)
    p.add_argument("--scan-points", dest="scan_points", type=int)

    p = subs.add_parser("moduli", help="storage/loss moduli and tangent loss")
    _add_common(p)
    p.add_argument("--case", choices=sorted(CASES))
    p.add_argument("--alpha", help="comma-separated fractional orders")
    p.add_argument("--e-inf", dest="e_inf", type=float)
    p.add_argument("--e-alpha", dest="e_alpha", type=float)
    p.add_argument("--omega", type=float)

    p = subs.add_parser("stress", help="stress under a ramp-then-hold strain program")
    _add_common(p)
    p.add_argument("--alpha", help="comma-separated fractional orders")
    p.add_argument("--e-inf", dest="e_inf", type=float)
    p.add_argument("--e-alpha", dest="e_alpha", type=float)
    p.add_argument("--rate", type=float)
    p.add_argument("--t-switch", dest="t_switch", type=float)
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--stride", type=int)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args.experiment, args)
        start = time.perf_counter()
        outputs = HANDLERS[args.experiment](cfg)
        wall = time.perf_counter() - start
        if cfg.get("out"):
            _write_manifest(args.experiment, cfg, outputs, wall)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
