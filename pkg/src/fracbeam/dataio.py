"""Deterministic CSV/JSON writers shared by the library and the CLI.

Floats are rendered with 17 significant digits, the decimal separator is
always '.', and line endings are LF regardless of platform or locale.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .lintegrate import TrajectoryRecord
from .mms import Stability, SteadyStateCubic

__all__ = [
    "format_float",
    "write_csv",
    "write_json",
    "write_trajectory_csv",
    "write_sweep_csv",
    "write_response_csv",
    "write_bifurcation_json",
    "write_moduli_json",
    "write_stress_csv",
]


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


def write_csv(path, header, rows) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


def write_json(path, payload) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_trajectory_csv(record: TrajectoryRecord, path, stride: int = 1) -> None:
    """Header t,q,qdot,qddot. The stride decimates the export only; the
    stored trajectory stays full-resolution."""
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    t = record.times()[::stride]
    rows = zip(t, record.q[::stride], record.qdot[::stride], record.qddot[::stride])
    write_csv(path, ("t", "q", "qdot", "qddot"), rows)


def write_sweep_csv(path, sweep) -> None:
    """Header omega_b,amp_max; one row per sweep frequency."""
    write_csv(path, ("omega_b", "amp_max"), ((w, a) for w, a in np.asarray(sweep)))


def write_response_csv(path, response: list[tuple[float, SteadyStateCubic]]) -> None:
    """Header Delta,a,stable; one row per admissible steady amplitude."""
    rows = []
    for delta, cubic in response:
        for root in cubic.roots:
            rows.append((delta, root.amplitude, root.stability is Stability.STABLE))
    write_csv(path, ("Delta", "a", "stable"), rows)


def write_bifurcation_json(path, entries) -> None:
    """List of {alpha, delta_lo, delta_hi} three-root intervals (None when absent)."""
    write_json(path, list(entries))


def write_moduli_json(path, rows) -> None:
    """List of {alpha, omega, G1, G2, tan_loss} records."""
    write_json(path, list(rows))


def write_stress_csv(path, t, strain, stress) -> None:
    write_csv(path, ("t", "strain", "stress"), zip(t, strain, stress))
