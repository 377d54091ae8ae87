"""Dissipating energy flow analysis for forced oscillations.

The package splits into five layers:

* :mod:`deflab.elements` — small-signal frequency response matrices for
  an impedance load, a constant-power load, and a classical machine;
* :mod:`deflab.passivity` — the frequency-domain dissipation matrix,
  its closed-form eigenvalues, and passivity verdicts over a grid;
* :mod:`deflab.defengine` — dissipating energy traces from sampled
  waveforms, plus the windowed average-power fit;
* :mod:`deflab.simulator` — fixed-step forced-bus simulation of all
  three elements sharing one bus;
* :mod:`deflab.cli` — the ``deflab`` command (simulate / def /
  passivity / predict) with delimited output and rendered figures.

Sign convention used throughout: element current is positive flowing
*into* the element, so a positive dissipating energy slope marks a
sink and a negative one marks an oscillation source.
"""

from .config import ConfigError, ScenarioConfig, load_scenario, parse_scenario
from .csvio import (
    TIMESERIES_HEADER,
    SchemaError,
    read_def_trace,
    read_timeseries,
    write_def_trace,
    write_passivity,
    write_timeseries,
)
from .defengine import (
    DefTrace,
    ElementTimeSeries,
    def_integral,
    def_integral_raw,
    differentiate,
)
from .elements import (
    ClassicalGenerator,
    ElementModel,
    ImpedanceLoad,
    PowerLoadOperatingPoint,
    ResonanceError,
    frf_generator,
    frf_impedance,
    frf_of,
    frf_power_load,
    generator_equilibrium,
    generator_gamma,
    power_load_from_pq,
)
from .passivity import (
    DEF_TRANSFORM,
    INDEFINITE,
    LOSSLESS,
    PASSIVE,
    STRICTLY_PASSIVE,
    HermitianK,
    PassivityReport,
    PassivityTransform,
    classify,
    default_grid,
    dissipating_power,
    eig_hermitian_2x2,
    gamma,
    generator_eig_analytic,
    k_matrix,
    resistor_power_analytic,
)
from .simulator import (
    ForcingSpec,
    NumericalAbort,
    ScenarioResult,
    bus_voltage,
    load_currents,
    run_scenario,
    step_generator,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # elements
    "ImpedanceLoad", "PowerLoadOperatingPoint", "ClassicalGenerator",
    "ElementModel", "ResonanceError",
    "frf_impedance", "frf_power_load", "frf_generator", "frf_of",
    "generator_gamma", "generator_equilibrium", "power_load_from_pq",
    # passivity
    "gamma", "k_matrix", "eig_hermitian_2x2", "classify", "default_grid",
    "generator_eig_analytic", "resistor_power_analytic", "dissipating_power",
    "HermitianK", "PassivityReport", "PassivityTransform", "DEF_TRANSFORM",
    "LOSSLESS", "PASSIVE", "STRICTLY_PASSIVE", "INDEFINITE",
    # def engine
    "ElementTimeSeries", "DefTrace", "differentiate",
    "def_integral", "def_integral_raw",
    # simulator
    "ForcingSpec", "ScenarioResult", "NumericalAbort",
    "bus_voltage", "load_currents", "step_generator", "run_scenario",
    # config
    "ConfigError", "ScenarioConfig", "parse_scenario", "load_scenario",
    # delimited IO
    "SchemaError", "TIMESERIES_HEADER", "write_timeseries", "read_timeseries",
    "write_def_trace", "read_def_trace", "write_passivity",
]
