"""Scenario configuration files.

A scenario lives in an INI-style text file with one section per element
plus the forcing and output blocks::

    [generator]
    e_prime = 1.1        # internal EMF, pu
    x_d_prime = 0.3      # transient reactance, pu
    inertia_m = 4.0      # swing inertia coefficient
    damping_d = 10.0     # damping coefficient (any sign)
    p_mech = 1.0         # dispatch, pu

    [impedance]
    g_z = 1.0            # or give r_z/x_z instead
    b_z = -0.5

    [power_load]
    p = 0.8
    q = 0.2

    [forcing]
    frequency_hz = 0.5   # the only Hz-denominated knob; everything
                         # internal runs on rad/s
    amp_r = 0.01
    amp_i = 0.01
    theta_r = 0.6283185307179586
    theta_i = 0.0
    v_r0 = 1.0
    v_i0 = 0.0
    duration = 62.0
    # optional: step, ramp_in, hold

    [output]
    timeseries = out.csv

    [window]             # optional section
    periods = 28         # cap on the power-fit window

Unknown sections or keys are rejected, with the offending line number
where it can be located. The machine equilibrium is solved at parse
time, so an infeasible dispatch fails here rather than mid-run.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from typing import Optional

from .elements import (
    ClassicalGenerator,
    ImpedanceLoad,
    PowerLoadOperatingPoint,
    generator_equilibrium,
    power_load_from_pq,
)
from .simulator import ForcingSpec

__all__ = ["ConfigError", "ScenarioConfig", "parse_scenario", "load_scenario"]


class ConfigError(ValueError):
    """A scenario file (or related input) is malformed or inconsistent."""


_SCHEMA = {
    "generator": {"e_prime", "x_d_prime", "inertia_m", "damping_d", "p_mech"},
    "impedance": {"g_z", "b_z", "r_z", "x_z"},
    "power_load": {"p", "q"},
    "forcing": {
        "frequency_hz", "amp_r", "amp_i", "theta_r", "theta_i",
        "v_r0", "v_i0", "duration", "step", "ramp_in", "hold",
    },
    "output": {"timeseries"},
    "window": {"periods"},
}
_OPTIONAL_SECTIONS = {"window"}
_OPTIONAL_KEYS = {
    "forcing": {"step", "ramp_in", "hold"},
    "impedance": {"g_z", "b_z", "r_z", "x_z"},  # pair choice checked separately
    "window": {"periods"},
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything a run needs, already cross-validated."""

    gen: ClassicalGenerator
    z: ImpedanceLoad
    pload: PowerLoadOperatingPoint
    forcing: ForcingSpec
    p_m: float
    timeseries_path: str
    window_periods: Optional[int]


def _line_of(text: str, section: str, key: Optional[str] = None) -> Optional[int]:
    """Best-effort line number of a section header or of a key inside it."""
    in_section = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if key is None and name == section:
                return lineno
            in_section = name == section
        elif in_section and key is not None:
            head = line.split("=", 1)[0].strip()
            if head == key:
                return lineno
    return None


def _fail(path: str, text: str, section: str, key: Optional[str], message: str):
    lineno = _line_of(text, section, key)
    where = f"{path}:{lineno}" if lineno is not None else path
    raise ConfigError(f"{where}: {message}")


def parse_scenario(text: str, path: str = "<config>") -> ScenarioConfig:
    """Parse and validate scenario text; see the module docstring."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=path)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc

    for section in parser.sections():
        if section not in _SCHEMA:
            _fail(path, text, section, None, f"unknown section [{section}]")
        for key in parser[section]:
            if key not in _SCHEMA[section]:
                _fail(path, text, section, key, f"unknown key {key!r} in [{section}]")
    for section, keys in _SCHEMA.items():
        if section not in parser:
            if section in _OPTIONAL_SECTIONS:
                continue
            raise ConfigError(f"{path}: missing section [{section}]")
        optional = _OPTIONAL_KEYS.get(section, set())
        for key in keys - optional:
            if key not in parser[section]:
                _fail(path, text, section, None, f"missing key {key!r} in [{section}]")

    def number(section: str, key: str, default=None):
        if key not in parser[section]:
            return default
        raw = parser[section][key]
        try:
            return float(raw)
        except ValueError:
            _fail(path, text, section, key, f"{key!r} must be a number, got {raw!r}")

    # impedance: exactly one parameterization
    imp = parser["impedance"]
    has_gb = "g_z" in imp or "b_z" in imp
    has_rx = "r_z" in imp or "x_z" in imp
    if has_gb and has_rx:
        _fail(path, text, "impedance", None, "give either g_z/b_z or r_z/x_z, not both")
    try:
        if has_rx:
            if "r_z" not in imp or "x_z" not in imp:
                _fail(path, text, "impedance", None, "r_z and x_z must be given together")
            z = ImpedanceLoad.from_rx(number("impedance", "r_z"), number("impedance", "x_z"))
        else:
            if "g_z" not in imp or "b_z" not in imp:
                _fail(path, text, "impedance", None, "g_z and b_z must be given together")
            z = ImpedanceLoad(number("impedance", "g_z"), number("impedance", "b_z"))
    except ConfigError:
        raise
    except ValueError as exc:
        _fail(path, text, "impedance", None, str(exc))

    freq_hz = number("forcing", "frequency_hz")
    if not freq_hz > 0.0:
        _fail(path, text, "forcing", "frequency_hz", "frequency_hz must be positive")
    kwargs = dict(
        omega=2.0 * math.pi * freq_hz,  # the single Hz -> rad/s conversion
        amp_r=number("forcing", "amp_r"),
        amp_i=number("forcing", "amp_i"),
        theta_r=number("forcing", "theta_r"),
        theta_i=number("forcing", "theta_i"),
        v_r0=number("forcing", "v_r0"),
        v_i0=number("forcing", "v_i0"),
        duration=number("forcing", "duration"),
    )
    for opt in ("step", "ramp_in", "hold"):
        val = number("forcing", opt)
        if val is not None:
            kwargs[opt] = val
    try:
        forcing = ForcingSpec(**kwargs)
    except ValueError as exc:
        _fail(path, text, "forcing", None, str(exc))

    v_t = math.hypot(forcing.v_r0, forcing.v_i0)
    theta_t = math.atan2(forcing.v_i0, forcing.v_r0)
    p_mech = number("generator", "p_mech")
    try:
        gen = generator_equilibrium(
            number("generator", "e_prime"),
            number("generator", "x_d_prime"),
            v_t,
            theta_t,
            p_mech,
            inertia_m=number("generator", "inertia_m"),
            damping_d=number("generator", "damping_d"),
        )
    except ValueError as exc:
        _fail(path, text, "generator", None, str(exc))
    try:
        pload = power_load_from_pq(
            number("power_load", "p"), number("power_load", "q"),
            forcing.v_r0, forcing.v_i0,
        )
    except ValueError as exc:
        _fail(path, text, "power_load", None, str(exc))

    timeseries = parser["output"]["timeseries"].strip()
    if not timeseries:
        _fail(path, text, "output", "timeseries", "timeseries path must not be empty")

    window_periods = None
    if "window" in parser and "periods" in parser["window"]:
        raw = parser["window"]["periods"]
        try:
            window_periods = int(raw)
        except ValueError:
            _fail(path, text, "window", "periods", f"periods must be an integer, got {raw!r}")
        if window_periods < 1:
            _fail(path, text, "window", "periods", "periods must be at least 1")

    return ScenarioConfig(
        gen=gen,
        z=z,
        pload=pload,
        forcing=forcing,
        p_m=p_mech,
        timeseries_path=timeseries,
        window_periods=window_periods,
    )


def load_scenario(path: str) -> ScenarioConfig:
    """Read and parse a scenario file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_scenario(text, path=path)
