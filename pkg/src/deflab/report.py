"""Figure rendering for the command-line report paths.

matplotlib is imported lazily with the Agg backend so headless runs
(and library users who never plot) don't pay for a display stack.
Each renderer writes one PNG next to the delimited output it
illustrates.
"""

from __future__ import annotations

import math
from typing import Dict

import numpy as np

from .defengine import DefTrace
from .passivity import PassivityReport
from .simulator import ScenarioResult

__all__ = [
    "render_simulation_figure",
    "render_def_figure",
    "render_passivity_figure",
]

_ELEMENT_LABELS = {"gen": "generator", "z": "impedance load", "p": "power load"}


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_simulation_figure(result: ScenarioResult, traces: Dict[str, DefTrace],
                             path: str) -> None:
    """Bus-voltage perturbation and per-element energy traces, stacked."""
    plt = _pyplot()
    spec = result.spec
    t = result.gen.t
    fig, (ax_v, ax_e) = plt.subplots(2, 1, sharex=True, figsize=(8.0, 6.0))
    ax_v.plot(t, result.gen.v_r - spec.v_r0, label="$\\Delta V_r$", lw=0.8)
    ax_v.plot(t, result.gen.v_i - spec.v_i0, label="$\\Delta V_i$", lw=0.8)
    ax_v.set_ylabel("bus voltage perturbation (pu)")
    ax_v.legend(loc="upper right", fontsize="small")
    ax_v.grid(True, alpha=0.3)
    for name, trace in traces.items():
        ax_e.plot(trace.t, trace.e_star,
                  label=f"{_ELEMENT_LABELS.get(name, name)}", lw=1.0)
    ax_e.axhline(0.0, color="k", lw=0.5)
    ax_e.set_xlabel("time (s)")
    ax_e.set_ylabel("dissipating energy $E^*$ (pu·s)")
    ax_e.legend(loc="best", fontsize="small")
    ax_e.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_def_figure(trace: DefTrace, element: str, path: str) -> None:
    """One energy trace with its fitted trailing-window slope overlaid."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    ax.plot(trace.t, trace.e_star, lw=1.0,
            label=f"$E^*$ ({_ELEMENT_LABELS.get(element, element)})")
    t1 = float(trace.t[-1])
    t0 = t1 - trace.window
    mask = trace.t >= t0 - 0.5 * (trace.t[1] - trace.t[0])
    tw = trace.t[mask]
    ew = trace.e_star[mask]
    # reconstruct the fit line through the window mean
    e_mid = float(ew.mean())
    t_mid = float(tw.mean())
    ax.plot([t0, t1],
            [e_mid + trace.p_bar * (t0 - t_mid), e_mid + trace.p_bar * (t1 - t_mid)],
            "r--", lw=1.2, label=f"fit: $\\bar P$ = {trace.p_bar:.3e} pu")
    ax.axhline(0.0, color="k", lw=0.5)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("dissipating energy $E^*$ (pu·s)")
    ax.legend(loc="best", fontsize="small")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_passivity_figure(reports: Dict[str, PassivityReport], g_z: float,
                            path: str) -> None:
    """Eigenvalue loci over frequency, with the impedance closed form dashed."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(8.0, 5.0))
    for name, rep in reports.items():
        f_hz = np.asarray(rep.omegas) / (2.0 * math.pi)
        label = _ELEMENT_LABELS.get(name, name)
        lines = ax.semilogx(f_hz, rep.lam_max, lw=1.2,
                            label=f"{label} ({rep.verdict})")
        ax.semilogx(f_hz, rep.lam_min, lw=1.2, color=lines[0].get_color())
        if name == "z":
            ax.semilogx(f_hz, g_z / rep.omegas, "k--", lw=0.8,
                        label="$\\pm G_z/\\Omega$ (closed form)")
            ax.semilogx(f_hz, -g_z / rep.omegas, "k--", lw=0.8)
    ax.axhline(0.0, color="k", lw=0.5)
    ax.set_xlabel("frequency (Hz)")
    ax.set_ylabel("eigenvalues of the dissipation matrix")
    ax.legend(loc="best", fontsize="small")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
