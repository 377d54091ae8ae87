"""Forced-oscillation simulation of elements tied to an infinite bus.

The scenario: one classical machine, one constant impedance load and
one constant power load all connect directly to a bus whose voltage is
prescribed. The bus carries a steady phasor plus a sinusoidal
perturbation on each rectangular channel:

    v_r(t) = v_r0 + r(t) * amp_r * cos(omega*t + theta_r)
    v_i(t) = v_i0 + r(t) * amp_i * cos(omega*t + theta_i)

``r(t)`` holds at zero for ``hold`` seconds (a quiet window used later
for baseline estimation), then rises to one as a half cosine over
``ramp_in`` seconds so the forcing switches on without a jolt.

The loads respond algebraically. The machine responds through its swing
dynamics,

    d(delta)/dt = dw
    inertia_m * d(dw)/dt = p_m - p_e - damping_d * dw
    p_e = (e'/x') * (v_r*sin(delta) - v_i*cos(delta))

integrated with fixed-step classical Runge-Kutta (RK4); the bus voltage
is evaluated at the half and full step for the inner stages. Fixed
stepping keeps runs bit-reproducible: the same spec always yields the
same samples.

All element current series are positive *into* the element, so the
machine's natural output current is negated before storage. That makes
every series directly consumable by :mod:`deflab.defengine` under one
sign convention (positive dissipating energy = absorbing element).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Tuple, Union

import numpy as np

from .defengine import ElementTimeSeries
from .elements import ClassicalGenerator, ImpedanceLoad, PowerLoadOperatingPoint

__all__ = [
    "NumericalAbort",
    "ForcingSpec",
    "ScenarioResult",
    "bus_voltage",
    "load_currents",
    "step_generator",
    "run_scenario",
]

#: Bus voltage magnitude below which the constant power load model is
#: meaningless and the run aborts.
COLLAPSE_LIMIT = 0.1


class NumericalAbort(RuntimeError):
    """Simulation stopped: a state or algebraic quantity left the domain
    where the models are trustworthy (voltage collapse, non-finite rotor
    state)."""


@dataclass(frozen=True)
class ForcingSpec:
    """Prescribed bus voltage and sampling plan for one scenario.

    ``omega`` is the forcing frequency in rad/s; amplitudes are peak,
    per-unit. ``duration`` is the total simulated time including the
    quiet ``hold`` window. ``step`` defaults to ``min(1 ms,
    period/200)`` and may not exceed ``period/200``; ``ramp_in``
    defaults to two forcing periods.
    """

    omega: float
    amp_r: float
    amp_i: float
    theta_r: float
    theta_i: float
    v_r0: float
    v_i0: float
    duration: float
    step: float = None  # type: ignore[assignment]
    ramp_in: float = None  # type: ignore[assignment]
    hold: float = 2.0

    def __post_init__(self):
        if not self.omega > 0.0:
            raise ValueError("omega must be positive")
        if self.amp_r < 0.0 or self.amp_i < 0.0:
            raise ValueError("forcing amplitudes must be nonnegative")
        period = 2.0 * math.pi / self.omega
        if self.step is None:
            object.__setattr__(self, "step", min(1e-3, period / 200.0))
        if self.ramp_in is None:
            object.__setattr__(self, "ramp_in", 2.0 * period)
        if not self.step > 0.0:
            raise ValueError("step must be positive")
        if self.step > period / 200.0 + 1e-15:
            raise ValueError("step must resolve the forcing: step <= period/200")
        if self.duration < 10.0 * period:
            raise ValueError("duration must cover at least 10 forcing periods")
        if self.hold < 0.0 or self.ramp_in < 0.0:
            raise ValueError("hold and ramp_in must be nonnegative")
        if self.hold + self.ramp_in >= self.duration:
            raise ValueError("hold + ramp_in must leave forced time inside duration")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega


@dataclass(frozen=True)
class ScenarioResult:
    """Sampled trajectories of one run.

    The three element series share the identical time and voltage
    arrays (same objects, not copies). ``delta``/``delta_omega`` are the
    rotor angle and speed deviation samples.
    """

    gen: ElementTimeSeries
    z: ElementTimeSeries
    p: ElementTimeSeries
    delta: np.ndarray
    delta_omega: np.ndarray
    spec: ForcingSpec
    p_m: float


def _ramp(spec: ForcingSpec, t):
    t = np.asarray(t, dtype=float)
    if spec.ramp_in == 0.0:
        return (t > spec.hold).astype(float)
    x = np.clip((t - spec.hold) / spec.ramp_in, 0.0, 1.0)
    return 0.5 - 0.5 * np.cos(np.pi * x)


def bus_voltage(spec: ForcingSpec, t):
    """Bus voltage channels at time(s) ``t``.

    Accepts a scalar or an array; returns ``(v_r, v_i)`` of matching
    shape. Before the ramp starts the channels sit exactly at the base
    phasor ``(v_r0, v_i0)``.
    """
    tt = np.asarray(t, dtype=float)
    r = _ramp(spec, tt)
    v_r = spec.v_r0 + r * spec.amp_r * np.cos(spec.omega * tt + spec.theta_r)
    v_i = spec.v_i0 + r * spec.amp_i * np.cos(spec.omega * tt + spec.theta_i)
    if tt.ndim == 0:
        return float(v_r), float(v_i)
    return v_r, v_i


def load_currents(bus, z: ImpedanceLoad, p: PowerLoadOperatingPoint):
    """Algebraic load currents (into each load) at bus voltage ``bus``.

    Works elementwise on scalars or arrays. The impedance current is
    ``(g+jb)*v``; the constant power load holds its operating-point P, Q
    while the voltage moves. Aborts when the voltage magnitude falls
    below 0.1 pu, where the constant power model stops being credible.
    """
    v_r, v_i = bus
    v_r = np.asarray(v_r, dtype=float)
    v_i = np.asarray(v_i, dtype=float)
    vm2 = v_r * v_r + v_i * v_i
    if np.any(vm2 < COLLAPSE_LIMIT * COLLAPSE_LIMIT):
        raise NumericalAbort(
            "voltage collapse: bus magnitude fell below "
            f"{COLLAPSE_LIMIT} pu (min |V| = {float(np.sqrt(vm2.min())):.4g})"
        )
    iz_r = z.g_z * v_r - z.b_z * v_i
    iz_i = z.b_z * v_r + z.g_z * v_i
    pw, qw = p.p, p.q
    ip_r = (pw * v_r + qw * v_i) / vm2
    ip_i = (pw * v_i - qw * v_r) / vm2
    return (iz_r, iz_i), (ip_r, ip_i)


def _rk4_step(dl, w, vr0, vi0, vrh, vih, vr1, vi1, e_x, m, d, p_m, h):
    # classical RK4 on the swing pair; bus voltage supplied at the
    # start, half and full step so forcing enters at full stage accuracy
    sin, cos = math.sin, math.cos
    k1d = w
    k1w = (p_m - e_x * (vr0 * sin(dl) - vi0 * cos(dl)) - d * w) / m
    a = dl + 0.5 * h * k1d
    b = w + 0.5 * h * k1w
    k2d = b
    k2w = (p_m - e_x * (vrh * sin(a) - vih * cos(a)) - d * b) / m
    a = dl + 0.5 * h * k2d
    b = w + 0.5 * h * k2w
    k3d = b
    k3w = (p_m - e_x * (vrh * sin(a) - vih * cos(a)) - d * b) / m
    a = dl + h * k3d
    b = w + h * k3w
    k4d = b
    k4w = (p_m - e_x * (vr1 * sin(a) - vi1 * cos(a)) - d * b) / m
    return (
        dl + (h / 6.0) * (k1d + 2.0 * k2d + 2.0 * k3d + k4d),
        w + (h / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w),
    )


def step_generator(
    state: Tuple[float, float],
    bus: Union[Tuple[float, float], Callable[[float], Tuple[float, float]]],
    params: ClassicalGenerator,
    p_m: float,
    h: float,
) -> Tuple[float, float]:
    """Advance the rotor state ``(delta, delta_omega)`` by one RK4 step.

    ``bus`` is either a fixed ``(v_r, v_i)`` pair, held over the step,
    or a callable mapping the stage offset in ``[0, h]`` to a voltage
    pair; pass a callable whenever the bus is time varying, otherwise
    the forcing is only sampled once per step and the integrator loses
    its order. A non-finite result aborts.
    """
    if not h > 0.0:
        raise ValueError("step must be positive")
    dl, w = state
    if callable(bus):
        vr0, vi0 = bus(0.0)
        vrh, vih = bus(0.5 * h)
        vr1, vi1 = bus(h)
    else:
        vr0, vi0 = bus
        vrh, vih, vr1, vi1 = vr0, vi0, vr0, vi0
    e_x = params.e_prime / params.x_d_prime
    out = _rk4_step(
        float(dl), float(w), float(vr0), float(vi0), float(vrh), float(vih),
        float(vr1), float(vi1), e_x, params.inertia_m, params.damping_d, p_m, h,
    )
    if not (math.isfinite(out[0]) and math.isfinite(out[1])):
        raise NumericalAbort("rotor state became non-finite")
    return out


def run_scenario(
    spec: ForcingSpec,
    elements: Tuple[ClassicalGenerator, ImpedanceLoad, PowerLoadOperatingPoint],
    p_m: float,
) -> ScenarioResult:
    """Simulate the full scenario and sample every element's waveforms.

    The machine starts on its equilibrium (``delta`` from the
    ``ClassicalGenerator``, zero speed deviation); ``p_m`` should be the
    matching mechanical power or the run begins with a transient. The
    quiet ``hold`` window must be at least 2 s so downstream baseline
    estimation has something to average. The machine series stores the
    negated terminal current (positive into the element, like the
    loads).
    """
    gen, z, pload = elements
    if spec.hold < 2.0:
        raise ValueError("run_scenario needs a pre-forcing hold of at least 2 s")
    h = spec.step
    n = int(round(spec.duration / h)) + 1
    t = np.arange(n) * h
    v_r, v_i = bus_voltage(spec, t)
    vh_r, vh_i = bus_voltage(spec, t[:-1] + 0.5 * h)

    delta = np.empty(n)
    domega = np.empty(n)
    dl = gen.delta
    w = 0.0
    delta[0] = dl
    domega[0] = w
    e_x = gen.e_prime / gen.x_d_prime
    m = gen.inertia_m
    d = gen.damping_d
    isfinite = math.isfinite
    # plain-float loop; list access is cheaper than ndarray indexing here
    vr_l = v_r.tolist()
    vi_l = v_i.tolist()
    vhr_l = vh_r.tolist()
    vhi_l = vh_i.tolist()
    for k in range(n - 1):
        dl, w = _rk4_step(
            dl, w, vr_l[k], vi_l[k], vhr_l[k], vhi_l[k], vr_l[k + 1], vi_l[k + 1],
            e_x, m, d, p_m, h,
        )
        if not (isfinite(dl) and isfinite(w)):
            raise NumericalAbort(
                f"rotor state became non-finite at t={t[k + 1]:.6g} s"
            )
        delta[k + 1] = dl
        domega[k + 1] = w

    # machine terminal current, negated to point into the element:
    # i = (v - e'*exp(1j*delta)) / (1j*x')
    ig_r = (v_i - gen.e_prime * np.sin(delta)) / gen.x_d_prime
    ig_i = (gen.e_prime * np.cos(delta) - v_r) / gen.x_d_prime
    (iz_r, iz_i), (ip_r, ip_i) = load_currents((v_r, v_i), z, pload)

    # the three series share the identical time/voltage arrays
    series_gen = ElementTimeSeries(t=t, v_r=v_r, v_i=v_i, i_r=ig_r, i_i=ig_i)
    series_z = ElementTimeSeries(t=t, v_r=v_r, v_i=v_i, i_r=iz_r, i_i=iz_i)
    series_p = ElementTimeSeries(t=t, v_r=v_r, v_i=v_i, i_r=ip_r, i_i=ip_i)
    return ScenarioResult(
        gen=series_gen,
        z=series_z,
        p=series_p,
        delta=delta,
        delta_omega=domega,
        spec=spec,
        p_m=p_m,
    )
