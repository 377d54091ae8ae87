"""Small-signal frequency response models of grid elements.

Every element is described by a 2x2 complex frequency response matrix
(FRF) that maps rectangular voltage perturbation phasors to rectangular
current perturbation phasors at a single oscillation frequency ``omega``
(rad/s):

    [I_r; I_i] = Y(omega) @ [V_r; V_i]

Phasors use the peak-amplitude convention, so a time signal
``a*cos(omega*t + theta)`` corresponds to the phasor ``a*exp(1j*theta)``.
All quantities are per-unit. Positive current flows *into* the element,
i.e. an element absorbing power at the operating point carries positive
in-phase current. The synchronous machine naturally pushes current out
of its terminals; its series must be negated before using these models
(the bundled simulator does this).

Three element families are covered:

``ImpedanceLoad``
    Constant admittance ``g_z + 1j*b_z``. Its FRF is frequency
    independent and follows directly from Ohm's law.

``PowerLoadOperatingPoint``
    Constant power load linearized about a steady operating point. The
    FRF depends only on the effective conductance ``g_p`` and
    susceptance ``b_p`` formed from the steady voltage and current.

``ClassicalGenerator``
    Classical machine (constant EMF ``e_prime`` behind transient
    reactance ``x_d_prime``) with swing dynamics. Its FRF combines an
    instantaneous reactive coupling with a rotor-motion term scaled by
    the complex factor returned by :func:`generator_gamma`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

__all__ = [
    "ResonanceError",
    "ImpedanceLoad",
    "PowerLoadOperatingPoint",
    "ClassicalGenerator",
    "ElementModel",
    "frf_impedance",
    "frf_power_load",
    "generator_gamma",
    "frf_generator",
    "frf_of",
    "power_load_from_pq",
    "generator_equilibrium",
]


class ResonanceError(ValueError):
    """Raised when an undamped machine is evaluated exactly at its
    electromechanical resonance, where the rotor response diverges."""


@dataclass(frozen=True)
class ImpedanceLoad:
    """Constant impedance (admittance) load.

    Parameters are the per-unit conductance ``g_z`` and susceptance
    ``b_z``. Use :meth:`from_rx` to build one from series resistance and
    reactance instead.
    """

    g_z: float
    b_z: float

    def __post_init__(self):
        if not (math.isfinite(self.g_z) and math.isfinite(self.b_z)):
            raise ValueError("impedance admittance must be finite")

    @classmethod
    def from_rx(cls, r_z: float, x_z: float) -> "ImpedanceLoad":
        """Build from series resistance and reactance, ``y = 1/(r + jx)``."""
        if r_z * r_z + x_z * x_z == 0.0:
            raise ValueError("r_z and x_z cannot both be zero")
        y = 1.0 / complex(r_z, x_z)
        load = cls(g_z=y.real, b_z=y.imag)
        # guard the inversion: admittance times impedance must give unity
        check = complex(load.g_z, load.b_z) * complex(r_z, x_z)
        if abs(check - 1.0) > 1e-12:
            raise ValueError("admittance inversion failed round-trip check")
        return load


@dataclass(frozen=True)
class PowerLoadOperatingPoint:
    """Constant power load pinned at a steady operating point.

    ``v_r, v_i`` and ``i_r, i_i`` are the rectangular steady-state
    voltage and current (current into the load). The effective
    conductance ``g_p`` and susceptance ``b_p`` used by the linearized
    FRF are derived at construction:

        g_p = (v_r*i_r - v_i*i_i) / (v_r**2 + v_i**2)
        b_p = (-v_i*i_r - i_i*v_r) / (v_r**2 + v_i**2)
    """

    v_r: float
    v_i: float
    i_r: float
    i_i: float
    g_p: float = field(init=False)
    b_p: float = field(init=False)

    def __post_init__(self):
        vm2 = self.v_r * self.v_r + self.v_i * self.v_i
        if not vm2 > 0.0:
            raise ValueError("operating point requires nonzero voltage magnitude")
        object.__setattr__(self, "g_p", (self.v_r * self.i_r - self.v_i * self.i_i) / vm2)
        object.__setattr__(self, "b_p", (-self.v_i * self.i_r - self.i_i * self.v_r) / vm2)

    @property
    def p(self) -> float:
        """Active power consumed at the operating point."""
        return self.v_r * self.i_r + self.v_i * self.i_i

    @property
    def q(self) -> float:
        """Reactive power consumed at the operating point."""
        return self.v_i * self.i_r - self.v_r * self.i_i


@dataclass(frozen=True)
class ClassicalGenerator:
    """Classical machine model with swing dynamics.

    Fields
    ------
    e_prime, x_d_prime
        Internal EMF magnitude and transient reactance (per-unit).
    inertia_m
        Rotor inertia constant (the coefficient multiplying angular
        acceleration in the swing equation).
    damping_d
        Damping coefficient. Any sign is allowed; negative damping
        models a machine that feeds oscillations instead of absorbing
        them.
    v_t
        Terminal voltage magnitude at the operating point.
    delta
        Steady rotor angle (absolute, same reference as the terminal
        voltage angle).
    phi
        Steady angle between rotor and terminal voltage,
        ``delta - theta_t``. Kept separately because the FRF depends on
        both the absolute angle (projection structure) and the relative
        angle (synchronizing torque).
    """

    e_prime: float
    x_d_prime: float
    inertia_m: float
    damping_d: float
    v_t: float
    delta: float
    phi: float

    def __post_init__(self):
        if self.e_prime <= 0.0:
            raise ValueError("e_prime must be positive")
        if self.x_d_prime <= 0.0:
            raise ValueError("x_d_prime must be positive")
        if self.inertia_m <= 0.0:
            raise ValueError("inertia_m must be positive")
        if self.v_t <= 0.0:
            raise ValueError("v_t must be positive")


ElementModel = Union[ImpedanceLoad, PowerLoadOperatingPoint, ClassicalGenerator]


def frf_impedance(load: ImpedanceLoad) -> np.ndarray:
    """Frequency response of a constant admittance.

    Rectangular form of ``I = (g + jb) V``; frequency independent:

        [[ g, -b],
         [ b,  g]]
    """
    g, b = load.g_z, load.b_z
    return np.array([[g, -b], [b, g]], dtype=complex)


def frf_power_load(load: PowerLoadOperatingPoint) -> np.ndarray:
    """Linearized frequency response of a constant power load.

    Built from the operating-point conductance and susceptance:

        [[-g_p, b_p],
         [ b_p, g_p]]

    The sign flip on the diagonal relative to an impedance is what makes
    this element lossless after the energy-flow transformation.
    """
    g, b = load.g_p, load.b_p
    return np.array([[-g, b], [b, g]], dtype=complex)


def generator_gamma(gen: ClassicalGenerator, omega: float) -> complex:
    """Complex rotor-motion factor of the machine FRF at ``omega``.

    gamma = (e'^2/x'^2) * ((m*(j*omega)^2 + (v_t*e'/x')*cos(phi)) - j*omega*d)
            / (((v_t*e'/x')*cos(phi) - m*omega^2)^2 + (omega*d)^2)

    The denominator is the squared magnitude of the rotor's
    characteristic polynomial on the imaginary axis, so it only vanishes
    for an undamped machine driven exactly at its natural frequency;
    that case raises :class:`ResonanceError`. For positive damping the
    imaginary part of gamma is strictly negative at every frequency.
    """
    if not omega > 0.0:
        raise ValueError("omega must be positive")
    e2x2 = (gen.e_prime / gen.x_d_prime) ** 2
    sync = (gen.v_t * gen.e_prime / gen.x_d_prime) * math.cos(gen.phi)
    a = sync - gen.inertia_m * omega * omega
    b = omega * gen.damping_d
    den = a * a + b * b
    if den == 0.0:
        raise ResonanceError(
            "undamped machine evaluated at its resonance frequency "
            f"(omega={omega!r}); the rotor response is unbounded there"
        )
    return e2x2 * complex(a, -b) / den


def frf_generator(gen: ClassicalGenerator, omega: float) -> np.ndarray:
    """Frequency response of the classical machine at ``omega``.

    Sum of the rotor-motion term, gamma times a rank-one projection
    built from the steady rotor angle, and the instantaneous coupling
    through the transient reactance:

        gamma * [[sin*cos, -cos^2 ],     [[ 0,    1/x'],
                 [sin^2,   -sin*cos]]  +  [-1/x', 0   ]]

    Current is positive into the element, so a machine series produced
    by the simulator must be sign-flipped before comparison.
    """
    gam = generator_gamma(gen, omega)
    s, c = math.sin(gen.delta), math.cos(gen.delta)
    kx = 1.0 / gen.x_d_prime
    rotor = np.array([[s * c, -c * c], [s * s, -s * c]], dtype=complex)
    coupling = np.array([[0.0, kx], [-kx, 0.0]], dtype=complex)
    return gam * rotor + coupling


def frf_of(model: ElementModel, omega: float) -> np.ndarray:
    """Evaluate the FRF of any element model at ``omega``."""
    if isinstance(model, ImpedanceLoad):
        return frf_impedance(model)
    if isinstance(model, PowerLoadOperatingPoint):
        return frf_power_load(model)
    if isinstance(model, ClassicalGenerator):
        return frf_generator(model, omega)
    raise TypeError(f"unsupported element model: {type(model)!r}")


def power_load_from_pq(p: float, q: float, v_r: float, v_i: float) -> PowerLoadOperatingPoint:
    """Operating point of a constant power load from its P, Q demand.

    Solves ``p + jq = v * conj(i)`` for the rectangular current:

        i_r = (p*v_r + q*v_i) / |v|^2
        i_i = (p*v_i - q*v_r) / |v|^2
    """
    vm2 = v_r * v_r + v_i * v_i
    if not vm2 > 0.0:
        raise ValueError("power load needs nonzero voltage magnitude")
    i_r = (p * v_r + q * v_i) / vm2
    i_i = (p * v_i - q * v_r) / vm2
    return PowerLoadOperatingPoint(v_r=v_r, v_i=v_i, i_r=i_r, i_i=i_i)


def generator_equilibrium(
    e_prime: float,
    x_d_prime: float,
    v_t: float,
    theta_t: float,
    p_g: float,
    *,
    inertia_m: float,
    damping_d: float,
) -> ClassicalGenerator:
    """Steady rotor angle of a machine dispatched at ``p_g``.

    Inverts the power-angle relation ``p_g = (e'*v_t/x') * sin(phi)``;
    the dispatch must satisfy ``|p_g| <= e'*v_t/x'`` or no equilibrium
    exists. Returns a fully populated :class:`ClassicalGenerator` with
    ``delta = theta_t + phi``.
    """
    p_max = e_prime * v_t / x_d_prime
    ratio = p_g / p_max
    if abs(ratio) > 1.0:
        raise ValueError(
            f"dispatch p_g={p_g!r} exceeds the steady-state limit {p_max!r}"
        )
    phi = math.asin(ratio)
    return ClassicalGenerator(
        e_prime=e_prime,
        x_d_prime=x_d_prime,
        inertia_m=inertia_m,
        damping_d=damping_d,
        v_t=v_t,
        delta=theta_t + phi,
        phi=phi,
    )
