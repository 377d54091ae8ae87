"""Command-line front end.

Four subcommands cover the full workflow::

    deflab simulate  --config scenario.cfg [--out series.csv] [--no-plot]
    deflab def       series.csv --element gen [--period S] [--out trace.csv] [--no-plot]
    deflab passivity --config scenario.cfg [--fmin HZ --fmax HZ --npts N] [--no-plot]
    deflab predict   --config scenario.cfg

Frequencies are given in Hz on the command line and in config files;
everything behind this module runs on rad/s. Exit codes: 0 on success,
2 for configuration/schema errors, 3 when the simulation aborts
numerically.

Each report-producing subcommand renders a PNG figure next to its
delimited output unless ``--no-plot`` is given.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional

from . import csvio, report
from .config import ConfigError, ScenarioConfig, load_scenario
from .defengine import def_integral
from .passivity import classify, default_grid, resistor_power_analytic
from .simulator import NumericalAbort, run_scenario

__all__ = ["main", "cmd_simulate", "cmd_def", "cmd_passivity", "cmd_predict"]

_ELEMENTS = ("gen", "z", "p")
_ELEMENT_ALIASES = {
    "gen": "gen", "generator": "gen",
    "z": "z", "impedance": "z",
    "p": "p", "power": "p", "power_load": "p",
}


def _figure_path(csv_path: str) -> str:
    root, _ = os.path.splitext(csv_path)
    return root + ".png"


def _fmt(x: float) -> str:
    return f"{float(x):.{csvio.precision()}g}"


def _interpret(p_bar: float) -> str:
    if p_bar > 0.0:
        return "sink (absorbs oscillation energy)"
    if p_bar < 0.0:
        return "source (injects oscillation energy)"
    return "neutral"


def _scenario_traces(config: ScenarioConfig, result) -> dict:
    spec = config.forcing
    settle = spec.hold + spec.ramp_in
    series = {"gen": result.gen, "z": result.z, "p": result.p}
    return {
        name: def_integral(
            ts,
            period=spec.period,
            pre_window=spec.hold,
            settle=settle,
            max_periods=config.window_periods,
        )
        for name, ts in series.items()
    }


def cmd_simulate(config_path: str, out: Optional[str] = None, plot: bool = True) -> None:
    """Run a scenario, write its timeseries, and summarize each element."""
    config = load_scenario(config_path)
    result = run_scenario(config.forcing, (config.gen, config.z, config.pload), config.p_m)
    out_path = out if out is not None else config.timeseries_path
    csvio.write_timeseries(out_path, result, window_periods=config.window_periods)
    traces = _scenario_traces(config, result)
    n = result.gen.t.size
    print(f"wrote {out_path} ({n} samples, step={_fmt(result.spec.step)} s)")
    for name in _ELEMENTS:
        trace = traces[name]
        print(
            f"  {name:<3} P_bar={_fmt(trace.p_bar)} "
            f"E_star_end={_fmt(trace.e_star[-1])} -> {_interpret(trace.p_bar)}"
        )
    if plot:
        fig_path = _figure_path(out_path)
        report.render_simulation_figure(result, traces, fig_path)
        print(f"wrote {fig_path}")


def cmd_def(series_path: str, element: str, period: Optional[float] = None,
            out: Optional[str] = None, plot: bool = True) -> None:
    """Compute a dissipating-energy trace from a stored timeseries."""
    name = _ELEMENT_ALIASES.get(element.lower())
    if name is None:
        raise ConfigError(f"unknown element {element!r}; choose from gen, z, p")
    meta, series = csvio.read_timeseries(series_path)
    if period is None:
        period = meta.get("period")
        if period is None:
            raise ConfigError(
                f"{series_path}: no period metadata; pass --period explicitly"
            )
    elif not period > 0.0:
        raise ConfigError("period must be positive")
    pre_window = meta.get("hold", 0.0)
    settle = pre_window + meta.get("ramp_in", 0.0)
    max_periods = meta.get("window_periods")
    if max_periods is not None:
        max_periods = int(max_periods)
    trace = def_integral(
        series[name],
        period=float(period),
        pre_window=pre_window,
        settle=settle,
        max_periods=max_periods,
    )
    if out is None:
        root, _ = os.path.splitext(series_path)
        out = f"{root}.def_{name}.csv"
    csvio.write_def_trace(out, trace)
    print(f"wrote {out}")
    print(
        f"  {name:<3} P_bar={_fmt(trace.p_bar)} "
        f"E_star_end={_fmt(trace.e_star[-1])} -> {_interpret(trace.p_bar)}"
    )
    if plot:
        fig_path = _figure_path(out)
        report.render_def_figure(trace, name, fig_path)
        print(f"wrote {fig_path}")


def cmd_passivity(config_path: str, fmin: float = 0.01, fmax: float = 10.0,
                  npts: int = 50, out: Optional[str] = None,
                  plot: bool = True) -> None:
    """Classify every configured element over a log frequency grid."""
    if not 0.0 < fmin < fmax:
        raise ConfigError("need 0 < fmin < fmax")
    if npts < 1:
        raise ConfigError("npts must be at least 1")
    config = load_scenario(config_path)
    grid = default_grid(fmin_hz=fmin, fmax_hz=fmax, npts=npts)
    models = {"gen": config.gen, "z": config.z, "p": config.pload}
    reports = {name: classify(model, grid) for name, model in models.items()}
    if out is None:
        out = "passivity.csv"
    csvio.write_passivity(out, reports, g_z=config.z.g_z)
    print(f"wrote {out}")
    for name in _ELEMENTS:
        print(f"  {name:<3} verdict={reports[name].verdict}")
    if plot:
        fig_path = _figure_path(out)
        report.render_passivity_figure(reports, config.z.g_z, fig_path)
        print(f"wrote {fig_path}")


def cmd_predict(config_path: str) -> None:
    """Print the closed-form injection of the configured impedance load."""
    config = load_scenario(config_path)
    spec = config.forcing
    phase_diff = spec.theta_r - spec.theta_i
    p_star = resistor_power_analytic(
        config.z.g_z, spec.omega, spec.amp_r, spec.amp_i, phase_diff
    )
    p_bar = 0.5 * p_star
    print(f"impedance load G_z={_fmt(config.z.g_z)} at omega={_fmt(spec.omega)} rad/s")
    print(f"  P_star={_fmt(p_star)} (quadratic-form convention, peak phasors)")
    print(f"  P_bar={_fmt(p_bar)} (time-averaged dissipating power, P_star/2)")
    print(f"  -> {_interpret(p_bar)}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deflab",
        description="Dissipating energy flow analysis for forced oscillations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario and write its timeseries")
    sim.add_argument("--config", required=True, help="scenario file")
    sim.add_argument("--out", help="timeseries path (overrides the config)")
    sim.add_argument("--no-plot", action="store_true", help="skip figure rendering")

    def_p = sub.add_parser("def", help="dissipating energy trace from a timeseries")
    def_p.add_argument("series", help="timeseries file from `deflab simulate`")
    def_p.add_argument("--element", required=True,
                       help="which element: gen, z or p")
    def_p.add_argument("--period", type=float,
                       help="forcing period in seconds (default: file metadata)")
    def_p.add_argument("--out", help="trace path (default: derived from input)")
    def_p.add_argument("--no-plot", action="store_true", help="skip figure rendering")

    pas = sub.add_parser("passivity", help="eigenvalue classification over frequency")
    pas.add_argument("--config", required=True, help="scenario file")
    pas.add_argument("--fmin", type=float, default=0.01, help="grid start, Hz")
    pas.add_argument("--fmax", type=float, default=10.0, help="grid end, Hz")
    pas.add_argument("--npts", type=int, default=50, help="grid points")
    pas.add_argument("--out", help="report path (default: passivity.csv)")
    pas.add_argument("--no-plot", action="store_true", help="skip figure rendering")

    pred = sub.add_parser("predict", help="closed-form impedance injection")
    pred.add_argument("--config", required=True, help="scenario file")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage and 0 on --help; pass both through
        return int(exc.code or 0)
    try:
        if args.command == "simulate":
            cmd_simulate(args.config, out=args.out, plot=not args.no_plot)
        elif args.command == "def":
            cmd_def(args.series, args.element, period=args.period,
                    out=args.out, plot=not args.no_plot)
        elif args.command == "passivity":
            cmd_passivity(args.config, fmin=args.fmin, fmax=args.fmax,
                          npts=args.npts, out=args.out, plot=not args.no_plot)
        elif args.command == "predict":
            cmd_predict(args.config)
    except (ConfigError, csvio.SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalAbort as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
