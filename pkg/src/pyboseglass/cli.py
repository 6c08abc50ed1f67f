"""
Batch front end.

Every subcommand reads an INI configuration file, validates all of it before
computing anything, writes CSV/JSON data into the output directory and records
a ``manifest.json`` next to it.

Subcommands:
- `mu-of-l`: Chemical potential over well radii at fixed interaction and density.
- `loc-curve`: Localization curve with optional power-law fit and rescaling.
- `fit`: Power-law fit of a curve CSV written by `loc-curve`.
- `thermo`: Finite-temperature sweeps, one CSV per density.
- `emission`: Angular emission pattern and scalar emission report.
- `print-config`: Effective configuration (defaults merged with the file).

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
"""

import argparse
import configparser
import csv
import hashlib
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .dtypes import (
    VARIANTS,
    ConfigError,
    ConvergenceError,
    EmissionModel,
    EmissionReport,
    FitParams,
    InsufficientDataError,
    LocalizationCurve,
    NoLocalizedSolutionError,
    RankError,
    ScanOptions,
    SolverOptions,
    format_float,
)
from .localization import density_grid, fit_power_law, localization_curve, mu_of_L, rescale_curve
from .materials import density_to_dimensionless, get_material, per_cm2
from .superradiance import emission_pattern_table, emission_report, enhancement_factor
from .thermo import condensation_temperature, regime, thermo_sweep

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class Field:
    """
    One configuration key.

    Attributes
    ----------
    kind : str
        "int", "float", "floats" (comma-separated), "bool" or "str".
    default
        Value used when the key is absent; None means optional without default.
    help : str
        Description shown by ``--help`` and ``print-config``.
    check : callable, optional
        Returns an error message for invalid parsed values, else None.
    choices : sequence of str, optional
        Admissible values of a "str" field.
    """

    def __init__(self, kind: str, default, help: str, check=None, choices=None):
        assert kind in ["int", "float", "floats", "bool", "str"], f"Unknown field kind {kind}"
        self.kind = kind
        self.default = default
        self.help = help
        self.check = check
        self.choices = choices

    def parse(self, text: str):
        text = text.strip()
        if self.kind == "int":
            return int(text)
        if self.kind == "float":
            if not text and self.default is None:
                return None
            return float(text)
        if self.kind == "floats":
            return [float(item) for item in text.split(",") if item.strip()]
        if self.kind == "bool":
            lowered = text.lower()
            if lowered in ["1", "true", "yes", "on"]:
                return True
            if lowered in ["0", "false", "no", "off"]:
                return False
            raise ValueError(f"not a boolean: {text!r}")
        if self.choices is not None and text not in self.choices:
            raise ValueError(f"must be one of {', '.join(self.choices)}")
        return text

    def format(self, value) -> str:
        if value is None:
            return ""
        if self.kind == "floats":
            return ", ".join(repr(float(v)) for v in value)
        if self.kind == "bool":
            return "true" if value else "false"
        return str(value)


def _positive(value):
    return None if value is None or value > 0 else "must be positive"


def _non_negative(value):
    return None if value >= 0 else "must be non-negative"


def _all_positive(values):
    return None if all(v > 0 for v in values) else "all values must be positive"


_SOLVER_DEFAULTS = SolverOptions()
_SCAN_DEFAULTS = ScanOptions()

SCHEMA = {
    "solver": {
        "nodes_per_radius": Field("int", _SOLVER_DEFAULTS.nodes_per_radius, "grid intervals per well radius",
                                  lambda v: None if v >= 4 else "must be at least 4"),
        "decay_lengths": Field("float", _SOLVER_DEFAULTS.decay_lengths, "cutoff distance in decay lengths", _positive),
        "r_max_min": Field("float", _SOLVER_DEFAULTS.r_max_min, "smallest cutoff in well radii",
                           lambda v: None if v > 1 else "must exceed 1"),
        "r_max_cap": Field("float", _SOLVER_DEFAULTS.r_max_cap, "largest cutoff in well radii", _positive),
        "residual_tol": Field("float", _SOLVER_DEFAULTS.residual_tol, "GP residual tolerance", _positive),
        "constraint_tol": Field("float", _SOLVER_DEFAULTS.constraint_tol, "amplitude condition tolerance", _positive),
        "stagnation_tol": Field("float", _SOLVER_DEFAULTS.stagnation_tol, "eigenvalue stagnation per step", _positive),
        "max_iterations": Field("int", _SOLVER_DEFAULTS.max_iterations, "imaginary-time step budget", _positive),
        "tau_initial": Field("float", _SOLVER_DEFAULTS.tau_initial, "initial imaginary-time step", _positive),
        "tau_min": Field("float", _SOLVER_DEFAULTS.tau_min, "smallest imaginary-time step", _positive),
        "tau_max": Field("float", _SOLVER_DEFAULTS.tau_max, "largest imaginary-time step", _positive),
        "max_outer": Field("int", _SOLVER_DEFAULTS.max_outer, "amplitude search budget", _positive),
        "initial_guess": Field("str", _SOLVER_DEFAULTS.initial_guess, "initial profile",
                               choices=["gaussian", "linear"]),
    },
    "scan": {
        "L_min": Field("float", _SCAN_DEFAULTS.L_min, "smallest scanned well radius", _positive),
        "L_max": Field("float", _SCAN_DEFAULTS.L_max, "largest scanned well radius", _positive),
        "L_points": Field("int", _SCAN_DEFAULTS.L_points, "coarse scan points",
                          lambda v: None if v >= 3 else "must be at least 3"),
        "refine_rtol": Field("float", _SCAN_DEFAULTS.refine_rtol, "relative refinement tolerance", _positive),
    },
    "material": {
        "preset": Field("str", "GaAs", "material preset (built in or [material:NAME])"),
        "L0": Field("float", 1e-8, "disorder length scale in m", _positive),
        "a0": Field("float", None, "exciton Bohr radius in m (default: from the preset)", _positive),
        "gamma0": Field("float", 1e9, "bulk recombination rate in 1/s", _positive),
        "wavelength": Field("float", 228e-9, "wavelength in the material in m", _positive),
    },
    "mu-of-l": {
        "u": Field("float", 1.0, "interaction strength", _non_negative),
        "n_c": Field("float", 0.06, "condensate density in 1/L0^2", _positive),
        "L_min": Field("float", 0.5, "smallest well radius", _positive),
        "L_max": Field("float", 40.0, "largest well radius", _positive),
        "L_points": Field("int", 80, "number of geometrically spaced radii", _non_negative),
    },
    "loc-curve": {
        "u": Field("float", 1.0, "interaction strength", _non_negative),
        "densities": Field("floats", [], "explicit densities (default: generated grid)", _all_positive),
        "n_min": Field("float", 0.01, "first generated density", _positive),
        "n_max": Field("float", 0.072, "last generated density", _positive),
        "count": Field("int", 16, "number of generated densities",
                       lambda v: None if v >= 2 else "must be at least 2"),
        "n_threshold": Field("float", 0.074, "density the generated grid refines toward", _positive),
        "fit": Field("bool", True, "fit the critical power law"),
        "rescale": Field("float", None, "also write the curve mapped by u -> u/a, n -> a n", _positive),
    },
    "fit": {
        "input": Field("str", "", "curve CSV to fit"),
        "u": Field("float", 1.0, "interaction strength of the curve", _positive),
    },
    "thermo": {
        "u": Field("float", 47.0, "interaction strength", _positive),
        "densities_cm2": Field("floats", [1.2e10, 0.8e10, 0.4e10], "total densities in 1/cm^2", _all_positive),
        "T_min": Field("float", 0.1, "lowest temperature in K", _positive),
        "T_max": Field("float", 5.0, "highest temperature in K", _positive),
        "T_points": Field("int", 40, "number of temperatures", _non_negative),
        "alpha": Field("float", 5.4, "power-law amplitude", _positive),
        "beta": Field("float", -0.1317, "power-law exponent",
                      lambda v: None if v < 0 else "must be negative"),
        "n_g": Field("float", 0.074, "critical value of u*n_c", _positive),
        "fit_file": Field("str", "", "fit.json overriding alpha, beta and n_g"),
    },
    "emission": {
        "L_c_um": Field("float", 1.0, "coherence length in micrometres", _positive),
        "chi": Field("float", 0.0, "dipole orientation angle in rad"),
        "phi_points": Field("int", 181, "polar angles on [0, pi]", _non_negative),
    },
    "run": {
        "out": Field("str", ".", "output directory"),
        "workers": Field("int", 1, "worker threads for independent sweep points", _positive),
        "variant": Field("str", "limit-consistent", "cooperativity prefactor", choices=list(VARIANTS)),
    },
}


class RunConfig:
    """
    Validated configuration of one run.

    Attributes
    ----------
    values : dict[str, dict]
        Parsed values per section, defaults filled in.
    parser : configparser.ConfigParser
        The raw file, kept for ``[material:NAME]`` presets.
    """

    def __init__(self, values: dict, parser: configparser.ConfigParser):
        self.values = values
        self.parser = parser

    def __getitem__(self, section: str) -> dict:
        return self.values[section]

    def solver_options(self) -> SolverOptions:
        return SolverOptions(**self.values["solver"])

    def scan_options(self) -> ScanOptions:
        return ScanOptions(**self.values["scan"])

    def material(self):
        return get_material(self.values["material"]["preset"], self.parser)

    def emission_model(self) -> EmissionModel:
        material = self["material"]
        a0 = material["a0"] if material["a0"] is not None else self.material().a0
        return EmissionModel(a0, material["gamma0"], material["wavelength"], self["run"]["variant"])

    def fit_params(self) -> FitParams:
        thermo = self["thermo"]
        if thermo["fit_file"]:
            return FitParams.from_dict(json.loads(Path(thermo["fit_file"]).read_text(encoding="utf-8")))
        return FitParams(thermo["alpha"], thermo["beta"], thermo["n_g"])

    def dump(self) -> str:
        """
        Returns
        -------
        str
            The effective configuration in INI form, with help comments.
        """
        lines = []
        for section, fields in SCHEMA.items():
            lines.append(f"[{section}]")
            for key, field in fields.items():
                lines.append(f"# {field.help}")
                lines.append(f"{key} = {field.format(self.values[section][key])}".rstrip())
            lines.append("")
        for section in self.parser.sections():
            if section.startswith("material:"):
                lines.append(f"[{section}]")
                lines.extend(f"{k} = {v}" for k, v in self.parser[section].items())
                lines.append("")
        return "\n".join(lines)

    def digest(self) -> str:
        return hashlib.sha256(self.dump().encode("utf-8")).hexdigest()


def load_config(path=None, overrides=None) -> RunConfig:
    """
    Read and validate a configuration file.

    Parameters
    ----------
    path : str or Path, optional
        INI file; without it every default applies.
    overrides : dict, optional
        Raw string values per section (the command-line flags), applied on top of the file.

    Returns
    -------
    RunConfig
        The validated configuration.

    Raises
    ------
    ConfigError
        With one message per offending field.
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    messages = []
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError([f"--config: no such file: {path}"])
        try:
            parser.read_string(path.read_text(encoding="utf-8"), source=str(path))
        except configparser.Error as e:
            raise ConfigError([f"--config: {e}"])
    for section, items in (overrides or {}).items():
        if not parser.has_section(section):
            parser.add_section(section)
        for key, text in items.items():
            parser[section][key] = text

    for section in parser.sections():
        if section not in SCHEMA and not section.startswith("material:"):
            messages.append(f"[{section}]: unknown section")

    values = {}
    for section, fields in SCHEMA.items():
        raw = parser[section] if parser.has_section(section) else {}
        for key in raw:
            if key not in fields:
                messages.append(f"[{section}] {key}: unknown key")
        parsed = {}
        for key, field in fields.items():
            value = field.default
            if key in raw:
                try:
                    value = field.parse(raw[key])
                except ValueError as e:
                    messages.append(f"[{section}] {key}: {e}")
                    continue
            if value is not None and field.check is not None:
                problem = field.check(value)
                if problem:
                    messages.append(f"[{section}] {key}: {problem}")
            parsed[key] = value
        values[section] = parsed

    if messages:
        raise ConfigError(messages)
    config = RunConfig(values, parser)
    _check_relations(config)
    return config


def _check_relations(config: RunConfig):
    messages = []
    solver, scan = config["solver"], config["scan"]
    if solver["r_max_cap"] < solver["r_max_min"]:
        messages.append("[solver] r_max_cap: must not be below r_max_min")
    if not solver["tau_min"] <= solver["tau_initial"] <= solver["tau_max"]:
        messages.append("[solver] tau_initial: must lie between tau_min and tau_max")
    if scan["L_min"] >= scan["L_max"]:
        messages.append("[scan] L_max: must exceed L_min")
    if config["mu-of-l"]["L_min"] >= config["mu-of-l"]["L_max"]:
        messages.append("[mu-of-l] L_max: must exceed L_min")
    curve = config["loc-curve"]
    if not curve["densities"] and not curve["n_min"] < curve["n_max"] < curve["n_threshold"]:
        messages.append("[loc-curve] n_max: need n_min < n_max < n_threshold")
    if np.any(np.diff(curve["densities"]) < 0):
        messages.append("[loc-curve] densities: must be sorted in increasing order")
    thermo = config["thermo"]
    if thermo["T_min"] > thermo["T_max"]:
        messages.append("[thermo] T_max: must not be below T_min")
    if thermo["fit_file"]:
        if not Path(thermo["fit_file"]).is_file():
            messages.append(f"[thermo] fit_file: no such file: {thermo['fit_file']}")
        else:
            try:
                config.fit_params()
            except json.JSONDecodeError as e:
                messages.append(f"[thermo] fit_file: not valid JSON: {e}")
            except KeyError as e:
                messages.append(f"[thermo] fit_file: missing key {e}")
            except (AssertionError, TypeError, ValueError) as e:
                messages.append(f"[thermo] fit_file: {e}")
    try:
        config.material()
    except ConfigError as e:
        messages.extend(e.messages)
    if messages:
        raise ConfigError(messages)


def _curve_densities(config: RunConfig):
    curve = config["loc-curve"]
    if curve["densities"]:
        return np.asarray(curve["densities"], dtype=float)
    return density_grid(curve["n_min"], curve["n_max"], curve["count"], curve["n_threshold"])


def _validate_command(command: str, config: RunConfig):
    """Checks that depend on the subcommand."""
    if command == "loc-curve" and config["loc-curve"]["fit"]:
        count = _curve_densities(config).size
        if count < 5:
            raise ConfigError(
                [f"[loc-curve] densities: the power-law fit needs at least 5 densities, got {count}"]
            )
    if command == "fit":
        source = config["fit"]["input"]
        if not source:
            raise ConfigError(["[fit] input: required"])
        if not Path(source).is_file():
            raise ConfigError([f"[fit] input: no such file: {source}"])


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, payload: dict):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def cmd_mu_of_L(config: RunConfig, out: Path):
    """
    Chemical potential over well radii; writes ``mu_of_L.csv`` (L, mu0, L_c, localized).
    """
    params = config["mu-of-l"]
    count = params["L_points"]
    L_values = np.geomspace(params["L_min"], params["L_max"], count) if count > 0 else np.empty(0)
    table = mu_of_L(params["u"], params["n_c"], L_values, config.solver_options(), config["run"]["workers"])
    path = out / "mu_of_L.csv"
    _write_csv(
        path,
        ["L", "mu0", "L_c", "localized"],
        [[format_float(L), format_float(mu0), format_float(L_c), str(int(flag))] for L, mu0, L_c, flag in table],
    )
    return [path]


def cmd_localization_curve(config: RunConfig, out: Path):
    """
    Localization curve; writes ``curve.csv``, optionally ``fit.json`` and ``curve_rescaled.csv``.
    """
    params = config["loc-curve"]
    curve = localization_curve(
        params["u"],
        _curve_densities(config),
        config.scan_options(),
        config.solver_options(),
        config["run"]["workers"],
    )
    path = out / "curve.csv"
    curve.to_csv(path)
    outputs = [path]
    if params["fit"]:
        fit = fit_power_law(curve)
        path = out / "fit.json"
        _write_json(path, fit.to_dict())
        outputs.append(path)
    if params["rescale"] is not None:
        path = out / "curve_rescaled.csv"
        rescale_curve(curve, params["rescale"]).to_csv(path)
        outputs.append(path)
    return outputs


def cmd_fit(config: RunConfig, out: Path):
    """
    Power-law fit of an existing curve; writes ``fit.json``.
    """
    params = config["fit"]
    fit = fit_power_law(LocalizationCurve.from_csv(params["input"], params["u"]))
    path = out / "fit.json"
    _write_json(path, fit.to_dict())
    return [path]


THERMO_COLUMNS = [
    "T_K",
    "lambda_m",
    "lambda_cr_m",
    "n_c_dimless",
    "fraction",
    "L_c_dimless",
    "L_c_um",
    "condensed",
    "enhancement",
]


def cmd_thermo(config: RunConfig, out: Path):
    """
    Finite-temperature sweeps; writes ``thermo_<i>.csv`` per density and ``thermo_summary.json``.
    """
    params = config["thermo"]
    material = config.material()
    L0 = config["material"]["L0"]
    fit = config.fit_params()
    model = config.emission_model()
    count = params["T_points"]
    T_grid = np.linspace(params["T_min"], params["T_max"], count) if count > 0 else np.empty(0)

    outputs = []
    summary = []
    for index, density_cm2 in enumerate(params["densities_cm2"], start=1):
        n = density_to_dimensionless(per_cm2(density_cm2), L0)
        states = thermo_sweep(n, params["u"], fit, material.M_kg, L0, T_grid, config["run"]["workers"])
        rows = []
        for state in states:
            enhancement = math.nan
            if state.condensed:
                try:
                    enhancement = enhancement_factor(model, state.L_c_m)
                except (ConvergenceError, OverflowError) as e:
                    logger.warning("enhancement at T=%g K, L_c=%g m failed: %s", state.T, state.L_c_m, e)
            rows.append(
                [
                    format_float(state.T),
                    format_float(state.Lambda_m),
                    format_float(state.Lambda_cr_m),
                    format_float(state.n_c),
                    format_float(state.condensate_fraction),
                    format_float(state.L_c),
                    format_float(state.L_c_um),
                    str(int(state.condensed)),
                    format_float(enhancement),
                ]
            )
        path = out / f"thermo_{index}.csv"
        _write_csv(path, THERMO_COLUMNS, rows)
        outputs.append(path)
        summary.append(
            {
                "file": path.name,
                "density_cm2": density_cm2,
                "n_dimless": n,
                "critical_density_dimless": fit.n_g / params["u"],
                "regime": regime(n, params["u"], fit),
                "T_c_K": condensation_temperature(n, params["u"], fit, material.M_kg, L0),
                "failed_points": sum(1 for s in states if s.error is not None),
            }
        )
    path = out / "thermo_summary.json"
    _write_json(path, {"fit": fit.to_dict(), "u": params["u"], "L0_m": L0, "densities": summary})
    outputs.append(path)
    return outputs


def cmd_emission(config: RunConfig, out: Path):
    """
    Emission pattern and report; writes ``emission_pattern.csv`` and ``emission_report.csv``.
    """
    params = config["emission"]
    model = config.emission_model()
    L_c = params["L_c_um"] * 1e-6
    count = params["phi_points"]
    phi_grid = np.linspace(0.0, math.pi, count) if count > 0 else np.empty(0)

    samples = emission_pattern_table(model, L_c, params["chi"], phi_grid)
    pattern_path = out / "emission_pattern.csv"
    _write_csv(
        pattern_path,
        ["phi_rad", "chi_rad", "intensity"],
        [[format_float(s.phi), format_float(s.chi), format_float(s.intensity)] for s in samples],
    )
    report = emission_report(model, L_c)
    report_path = out / "emission_report.csv"
    _write_csv(report_path, EmissionReport.COLUMNS, [report.to_row()])
    return [pattern_path, report_path]


COMMANDS = {
    "mu-of-l": cmd_mu_of_L,
    "loc-curve": cmd_localization_curve,
    "fit": cmd_fit,
    "thermo": cmd_thermo,
    "emission": cmd_emission,
}


def _configure_logging(verbose: int, quiet: bool):
    if quiet:
        level = logging.WARNING
    elif verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pyboseglass",
        description="Ground states, localization and superradiance of a two-dimensional Bose glass.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more log output (repeatable)")
    parser.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI configuration file")
    common.add_argument("--out", metavar="DIR", help="output directory (overrides [run] out)")
    common.add_argument("--workers", metavar="N", help="worker threads (overrides [run] workers)")
    common.add_argument("--variant", choices=VARIANTS, help="cooperativity prefactor (overrides [run] variant)")

    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, command in COMMANDS.items():
        sections = ", ".join(f"[{s}]" for s in SCHEMA)
        subparsers.add_parser(
            name,
            parents=[common],
            help=command.__doc__.strip().splitlines()[0],
            epilog=f"Configuration sections: {sections}. Run 'print-config' for all keys and defaults.",
        )
    subparsers.add_parser("print-config", parents=[common], help="print the effective configuration")
    return parser


def main(argv=None) -> int:
    """
    Command-line entry point.

    Parameters
    ----------
    argv : list[str], optional
        Arguments without the program name; defaults to ``sys.argv[1:]``.

    Returns
    -------
    int
        Exit code.
    """
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose, args.quiet)

    overrides = {
        "run": {
            key: value
            for key, value in [("out", args.out), ("workers", args.workers), ("variant", args.variant)]
            if value is not None
        }
    }
    try:
        config = load_config(args.config, overrides)
        if args.command == "print-config":
            sys.stdout.write(config.dump())
            return EXIT_OK
        _validate_command(args.command, config)
    except ConfigError as e:
        for message in e.messages:
            print(f"configuration error: {message}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(config["run"]["out"])
    out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    try:
        outputs = COMMANDS[args.command](config, out)
    except (ConvergenceError, NoLocalizedSolutionError, InsufficientDataError, RankError) as e:
        logger.error("%s failed: %s", args.command, e)
        print(f"numerical error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL

    manifest = {
        "subcommand": args.command,
        "config_sha256": config.digest(),
        "version": __version__,
        "wall_time_s": round(time.perf_counter() - started, 3),
        "outputs": [p.name for p in outputs],
    }
    _write_json(out / "manifest.json", manifest)
    logger.info("%s wrote %s", args.command, ", ".join(manifest["outputs"]))
    return EXIT_OK
