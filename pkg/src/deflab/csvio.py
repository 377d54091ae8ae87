"""Delimited-text input/output.

All files are plain comma-separated text with `#`-prefixed metadata
lines before the header row. Floats are written with `%.<N>g` where N
comes from the ``DEFLAB_PRECISION`` environment variable (default 17,
which round-trips IEEE doubles exactly — repeated runs of the same
scenario produce byte-identical files).

Timeseries schema (one row per sample)::

    # omega=3.141592653589793
    # period=2
    ...
    t,V_r,V_i,I_r_gen,I_i_gen,I_r_z,I_i_z,I_r_p,I_i_p

Energy-trace schema::

    # P_bar=6.28e-5 window=56.0
    t,E_star
"""

from __future__ import annotations

import os
from typing import Dict, Optional, Tuple

import numpy as np

from .config import ConfigError
from .defengine import DefTrace, ElementTimeSeries
from .passivity import PassivityReport
from .simulator import ScenarioResult

__all__ = [
    "SchemaError",
    "precision",
    "TIMESERIES_HEADER",
    "write_timeseries",
    "read_timeseries",
    "write_def_trace",
    "read_def_trace",
    "write_passivity",
]

TIMESERIES_HEADER = "t,V_r,V_i,I_r_gen,I_i_gen,I_r_z,I_i_z,I_r_p,I_i_p"
DEF_HEADER = "t,E_star"

ELEMENT_NAMES = ("gen", "z", "p")


class SchemaError(ValueError):
    """A delimited file does not match the expected layout."""


def precision() -> int:
    """Decimal digits used for float formatting (env DEFLAB_PRECISION)."""
    raw = os.environ.get("DEFLAB_PRECISION")
    if raw is None:
        return 17
    try:
        digits = int(raw)
    except ValueError:
        raise ConfigError(f"DEFLAB_PRECISION must be an integer, got {raw!r}") from None
    if not 1 <= digits <= 17:
        raise ConfigError(f"DEFLAB_PRECISION must be in 1..17, got {digits}")
    return digits


def _fmt(x: float, digits: int) -> str:
    return f"{float(x):.{digits}g}"


def _write_meta(fh, meta: Dict[str, float], digits: int) -> None:
    for key, value in meta.items():
        fh.write(f"# {key}={_fmt(value, digits)}\n")


def _timeseries_meta(result: ScenarioResult) -> Dict[str, float]:
    spec = result.spec
    meta = {
        "omega": spec.omega,
        "period": spec.period,
        "step": spec.step,
        "duration": spec.duration,
        "hold": spec.hold,
        "ramp_in": spec.ramp_in,
        "amp_r": spec.amp_r,
        "amp_i": spec.amp_i,
        "theta_r": spec.theta_r,
        "theta_i": spec.theta_i,
        "v_r0": spec.v_r0,
        "v_i0": spec.v_i0,
        "p_m": result.p_m,
    }
    return meta


def write_timeseries(path: str, result: ScenarioResult,
                     window_periods: Optional[int] = None) -> None:
    """Write a simulated scenario to a timeseries file."""
    digits = precision()
    meta = _timeseries_meta(result)
    if window_periods is not None:
        meta["window_periods"] = float(window_periods)
    gen, z, p = result.gen, result.z, result.p
    table = np.column_stack([
        gen.t, gen.v_r, gen.v_i,
        gen.i_r, gen.i_i, z.i_r, z.i_i, p.i_r, p.i_i,
    ])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        _write_meta(fh, meta, digits)
        fh.write(TIMESERIES_HEADER + "\n")
        np.savetxt(fh, table, fmt=f"%.{digits}g", delimiter=",")


def _read_prelude(fh, path: str) -> Tuple[Dict[str, float], str]:
    """Consume `# k=v` lines; return (metadata, header line)."""
    meta: Dict[str, float] = {}
    for raw in fh:
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            for token in body.split():
                if "=" not in token:
                    continue
                key, _, value = token.partition("=")
                try:
                    meta[key] = float(value)
                except ValueError:
                    raise SchemaError(f"{path}: bad metadata entry {token!r}")
            continue
        return meta, line
    raise SchemaError(f"{path}: no header row found")


def read_timeseries(path: str) -> Tuple[Dict[str, float], Dict[str, ElementTimeSeries]]:
    """Read a timeseries file back into per-element sample sets.

    Returns the metadata dictionary and a mapping keyed by ``gen``,
    ``z`` and ``p``. All three share the same bus-voltage columns.
    """
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read timeseries {path!r}: {exc}") from exc
    with fh:
        meta, header = _read_prelude(fh, path)
        if header != TIMESERIES_HEADER:
            raise SchemaError(
                f"{path}: expected header {TIMESERIES_HEADER!r}, got {header!r}"
            )
        try:
            table = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise SchemaError(f"{path}: malformed data row ({exc})") from exc
    if table.shape[0] < 3:
        raise SchemaError(f"{path}: need at least 3 samples, got {table.shape[0]}")
    if table.shape[1] != 9:
        raise SchemaError(f"{path}: expected 9 columns, got {table.shape[1]}")
    t, v_r, v_i = table[:, 0], table[:, 1], table[:, 2]
    columns = {"gen": (3, 4), "z": (5, 6), "p": (7, 8)}
    try:
        series = {
            name: ElementTimeSeries(t, v_r, v_i, table[:, ir], table[:, ii])
            for name, (ir, ii) in columns.items()
        }
    except ValueError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    return meta, series


def write_def_trace(path: str, trace: DefTrace) -> None:
    """Write a dissipating-energy trace with its fitted flow in the metadata."""
    digits = precision()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# P_bar={_fmt(trace.p_bar, digits)} window={_fmt(trace.window, digits)}\n")
        fh.write(DEF_HEADER + "\n")
        np.savetxt(fh, np.column_stack([trace.t, trace.e_star]),
                   fmt=f"%.{digits}g", delimiter=",")


def read_def_trace(path: str) -> Tuple[Dict[str, float], np.ndarray, np.ndarray]:
    """Read back an energy trace; returns (metadata, t, e_star)."""
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read trace {path!r}: {exc}") from exc
    with fh:
        meta, header = _read_prelude(fh, path)
        if header != DEF_HEADER:
            raise SchemaError(f"{path}: expected header {DEF_HEADER!r}, got {header!r}")
        try:
            table = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise SchemaError(f"{path}: malformed data row ({exc})") from exc
    if table.shape[1] != 2:
        raise SchemaError(f"{path}: expected 2 columns, got {table.shape[1]}")
    return meta, table[:, 0], table[:, 1]


def write_passivity(path: str, reports: Dict[str, PassivityReport],
                    g_z: float) -> None:
    """Write eigenvalue loci for the three elements over a frequency grid.

    All reports must share one grid. The impedance columns are doubled
    up with their closed-form values ``-/+ g_z / omega`` so a reader can
    check the numerics against the formula line by line.
    """
    digits = precision()
    names = [n for n in ELEMENT_NAMES if n in reports]
    if not names:
        raise ValueError("no reports to write")
    omegas = reports[names[0]].omegas
    for name in names[1:]:
        if not np.array_equal(reports[name].omegas, omegas):
            raise ValueError("reports use different frequency grids")
    columns = [np.asarray(omegas, dtype=float)]
    header = ["omega"]
    for name in names:
        rep = reports[name]
        columns.extend([rep.lam_min, rep.lam_max])
        header.extend([f"lam_min_{name}", f"lam_max_{name}"])
        if name == "z":
            columns.extend([-g_z / np.asarray(omegas), g_z / np.asarray(omegas)])
            header.extend(["z_analytic_neg", "z_analytic_pos"])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for name in names:
            rep = reports[name]
            fh.write(f"# verdict_{name}={rep.verdict} tol_{name}={_fmt(rep.tol, digits)}\n")
        fh.write(",".join(header) + "\n")
        np.savetxt(fh, np.column_stack(columns), fmt=f"%.{digits}g", delimiter=",")
