"""Energy-flow passivity analysis of element frequency responses.

The dissipating energy computed by :mod:`deflab.defengine` integrates
current against the *rate of change* of voltage. To reason about its
sign with ordinary passivity tools, an element FRF ``Y`` (current vs
voltage) is re-expressed as a response from voltage-rate inputs by the
frequency-scaled rotation :func:`gamma`:

    K(omega) = 0.5 * (Y @ gamma(omega) + (Y @ gamma(omega))^H)

``K`` is the Hermitian part of the rotated response. Its quadratic form
gives the average dissipating power injected by the element under
sinusoidal forcing, so its eigenvalue signs classify the element:

* both eigenvalues ~ 0 at every frequency: lossless (no average
  dissipating energy exchange at any forcing);
* eigenvalues >= 0: passive (the element can only absorb);
* one eigenvalue of each sign: indefinite (the element can act as a
  source of dissipating energy depending on the forcing).

Sign convention throughout: positive dissipating power means the
element absorbs (sinks) oscillation energy; a negative value marks a
source. Quadratic forms use peak-amplitude phasors, so the
time-averaged power is half the quadratic form; see
:func:`resistor_power_analytic`.

Left multiplication of ``Y`` by a weighting matrix is supported in
principle; this analysis uses the identity weight (see
``DEF_TRANSFORM``), so the product is elided in the arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .elements import (
    ClassicalGenerator,
    ElementModel,
    ResonanceError,
    frf_of,
)

__all__ = [
    "PassivityTransform",
    "DEF_TRANSFORM",
    "TRANSFORM_M",
    "HermitianK",
    "PassivityReport",
    "gamma",
    "k_matrix",
    "eig_hermitian_2x2",
    "classify",
    "default_grid",
    "generator_eig_analytic",
    "resistor_power_analytic",
    "dissipating_power",
    "LOSSLESS",
    "PASSIVE",
    "STRICTLY_PASSIVE",
    "INDEFINITE",
]

LOSSLESS = "Lossless"
PASSIVE = "Passive"
STRICTLY_PASSIVE = "StrictlyPassive"
INDEFINITE = "Indefinite"

#: Left weighting applied to element FRFs before taking Hermitian parts.
TRANSFORM_M = np.eye(2)


def gamma(omega: float) -> np.ndarray:
    """Rotation that turns voltage-rate phasors back into voltage phasors.

    For a sinusoid at ``omega``, differentiation multiplies a phasor by
    ``1j*omega``; this matrix undoes that and swaps the rectangular
    channels with opposite signs:

        [[0,          -1/(1j*omega)],      [[0,           1j/omega],
         [1/(1j*omega), 0          ]]   =   [-1j/omega,   0       ]]

    It is purely imaginary on the anti-diagonal, Hermitian, and
    satisfies ``gamma^H @ gamma = I / omega**2``.
    """
    if not omega > 0.0:
        raise ValueError("omega must be positive")
    return np.array([[0.0, 1j / omega], [-1j / omega, 0.0]])


@dataclass(frozen=True)
class PassivityTransform:
    """Pairing of the left weight and the input rotation used to move an
    element FRF into the dissipating-energy frame."""

    transform_m: np.ndarray
    gamma_at: Callable[[float], np.ndarray]


DEF_TRANSFORM = PassivityTransform(transform_m=TRANSFORM_M, gamma_at=gamma)


@dataclass(frozen=True)
class HermitianK:
    """Hermitian part of a rotated element response at one frequency."""

    matrix: np.ndarray
    omega: float

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.shape != (2, 2):
            raise ValueError("matrix must be 2x2")
        scale = max(1.0, float(np.abs(m).max()))
        if np.abs(m - m.conj().T).max() > 1e-14 * scale:
            raise ValueError("matrix is not Hermitian within tolerance")


def k_matrix(y: np.ndarray, omega: float) -> HermitianK:
    """Hermitian part of the rotated FRF, ``0.5*(Y G + (Y G)^H)``.

    The result is exactly Hermitian by construction. Susceptance-like
    (skew) parts of ``Y`` drop out entirely, which is why a purely
    reactive impedance produces the zero matrix.
    """
    yg = np.asarray(y, dtype=complex) @ gamma(omega)
    k = 0.5 * (yg + yg.conj().T)
    return HermitianK(matrix=k, omega=omega)


def eig_hermitian_2x2(k) -> Tuple[float, float]:
    """Both eigenvalues of a 2x2 Hermitian matrix, closed form.

    Accepts a :class:`HermitianK` or a raw 2x2 array (validated).
    Returns ``(lam_min, lam_max)`` from the trace/determinant formula

        lam = mean +/- sqrt(mean**2 - det),  mean = trace/2.

    The discriminant of a Hermitian matrix is nonnegative; tiny negative
    values from roundoff are clamped to zero.
    """
    if isinstance(k, HermitianK):
        m = np.asarray(k.matrix)
    else:
        m = np.asarray(k)
        if m.shape != (2, 2):
            raise ValueError("matrix must be 2x2")
        scale = max(1.0, float(np.abs(m).max()))
        if np.abs(m - m.conj().T).max() > 1e-14 * scale:
            raise ValueError("matrix is not Hermitian within tolerance")
    k00 = m[0, 0].real
    k11 = m[1, 1].real
    k01 = m[0, 1]
    mean = 0.5 * (k00 + k11)
    det = k00 * k11 - (k01.real * k01.real + k01.imag * k01.imag)
    disc = mean * mean - det
    root = math.sqrt(disc) if disc > 0.0 else 0.0
    return mean - root, mean + root


def default_grid(fmin_hz: float = 0.01, fmax_hz: float = 10.0, npts: int = 50) -> np.ndarray:
    """Log-spaced analysis frequencies in rad/s.

    Inputs are in Hz (the human-facing unit); the returned grid is in
    rad/s, which every other function here expects.
    """
    if not (fmin_hz > 0.0 and fmax_hz >= fmin_hz and npts >= 1):
        raise ValueError("need 0 < fmin_hz <= fmax_hz and npts >= 1")
    return 2.0 * np.pi * np.logspace(math.log10(fmin_hz), math.log10(fmax_hz), npts)


@dataclass(frozen=True)
class PassivityReport:
    """Eigenvalue sweep of an element's Hermitian rotated response.

    ``lam_min``/``lam_max`` hold one pair per grid frequency. The
    verdict is one of ``Lossless``, ``Passive``, ``StrictlyPassive`` or
    ``Indefinite`` as judged against ``tol``. The sweep only certifies
    behaviour at the evaluated grid points.
    """

    omegas: np.ndarray
    lam_min: np.ndarray
    lam_max: np.ndarray
    verdict: str
    tol: float


def classify(model: ElementModel, grid: Optional[np.ndarray] = None, tol: Optional[float] = None) -> PassivityReport:
    """Sweep an element over a frequency grid and judge its passivity.

    With ``tol=None`` the threshold adapts to the data:
    ``max(1e-12, 1e-9 * max|lam|)``. Verdicts, checked in order:

    * ``Lossless``: every eigenvalue within ``tol`` of zero;
    * ``StrictlyPassive``: smallest eigenvalue above ``tol`` everywhere;
    * ``Passive``: smallest eigenvalue above ``-tol`` everywhere;
    * ``Indefinite``: everything else (this includes elements whose
      response is negative, e.g. machines with negative damping).

    A resonance singularity inside the grid (undamped machine) is
    propagated as :class:`~deflab.elements.ResonanceError`.
    """
    omegas = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if omegas.ndim != 1 or omegas.size == 0:
        raise ValueError("grid must be a nonempty 1-d array of rad/s frequencies")
    if not np.all(omegas > 0.0):
        raise ValueError("grid frequencies must be positive")
    lam_min = np.empty(omegas.size)
    lam_max = np.empty(omegas.size)
    for idx, om in enumerate(omegas):
        lam_min[idx], lam_max[idx] = eig_hermitian_2x2(k_matrix(frf_of(model, float(om)), float(om)))
    if tol is None:
        peak = max(float(np.abs(lam_min).max()), float(np.abs(lam_max).max()))
        tol = max(1e-12, 1e-9 * peak)
    elif not tol > 0.0:
        raise ValueError("tol must be positive")
    if float(np.abs(lam_min).max()) <= tol and float(np.abs(lam_max).max()) <= tol:
        verdict = LOSSLESS
    elif float(lam_min.min()) > tol:
        verdict = STRICTLY_PASSIVE
    elif float(lam_min.min()) >= -tol:
        verdict = PASSIVE
    else:
        verdict = INDEFINITE
    return PassivityReport(omegas=omegas, lam_min=lam_min, lam_max=lam_max, verdict=verdict, tol=tol)


def generator_eig_analytic(gen: ClassicalGenerator, omega: float) -> float:
    """Nonzero eigenvalue of the machine's Hermitian rotated response.

    Closed form:

        d * (e'^2/x'^2)
        ---------------------------------------------
        ((v_t*e'/x')*cos(phi) - m*omega^2)^2 + (omega*d)^2

    The other eigenvalue is identically zero: the rotor-motion part of
    the FRF is rank one and the reactance coupling is skew. The sign
    follows the damping coefficient, so negative damping yields a
    negative eigenvalue (a dissipating-energy source).
    """
    if not omega > 0.0:
        raise ValueError("omega must be positive")
    sync = (gen.v_t * gen.e_prime / gen.x_d_prime) * math.cos(gen.phi)
    a = sync - gen.inertia_m * omega * omega
    b = omega * gen.damping_d
    den = a * a + b * b
    if den == 0.0:
        raise ResonanceError(
            "undamped machine evaluated at its resonance frequency "
            f"(omega={omega!r})"
        )
    return gen.damping_d * (gen.e_prime / gen.x_d_prime) ** 2 / den


def resistor_power_analytic(g_z: float, omega: float, amp_r: float, amp_i: float, phase_diff: float) -> float:
    """Quadratic-form dissipating power of a conductance under forcing.

    For peak-amplitude voltage phasors ``amp_r*exp(1j*theta_r)`` and
    ``amp_i*exp(1j*theta_i)`` with ``phase_diff = theta_r - theta_i``:

        p_star = 2 * g_z * omega * amp_i * amp_r * sin(phase_diff)

    NOTE: because phasors are peak amplitudes, the *time-averaged*
    dissipating power of the simulated waveform is ``p_star / 2``. Use
    that halved value when comparing against windowed slopes from
    :mod:`deflab.defengine`. The susceptance part of an impedance
    contributes nothing on average.
    """
    if not omega > 0.0:
        raise ValueError("omega must be positive")
    if amp_r < 0.0 or amp_i < 0.0:
        raise ValueError("amplitudes must be nonnegative")
    return 2.0 * g_z * omega * amp_i * amp_r * math.sin(phase_diff)


def dissipating_power(y: np.ndarray, omega: float, v_phasors: Tuple[complex, complex]) -> float:
    """Quadratic-form dissipating power of any FRF under given forcing.

    ``v_phasors`` are the rectangular voltage phasors ``(v_r, v_i)``
    (peak convention). The input is first moved to the voltage-rate
    frame, ``vt = (1j*omega*v_i, -1j*omega*v_r)``, then the real part of
    the rotated quadratic form is returned:

        Re( vt^H @ (Y @ gamma(omega)) @ vt )

    Time-averaged power under the matching sinusoidal forcing is half
    this value. Positive means the element absorbs oscillation energy.
    """
    v_r, v_i = v_phasors
    vt = np.array([1j * omega * v_i, -1j * omega * v_r])
    yg = np.asarray(y, dtype=complex) @ gamma(omega)
    return float((vt.conj() @ yg @ vt).real)
