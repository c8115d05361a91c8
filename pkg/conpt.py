#!/usr/bin/env python3
"""
ConPT Command-Line Runner

Orchestrates sweeps and analyses and writes their results as CSV files.

Commands:
    reduce          sponge-crossing value of a network file by randomized
                    series/parallel/star-mesh reduction
    bethe           exact or finite Bethe-lattice curves
    lattice-sweep   reduction sweeps over square, honeycomb or triangular
                    lattices (curve CSV, readable by fit)
    mc              classical Monte Carlo crossing curves
    fit             thresholds and exponents from curve CSVs, or the Bethe
                    exponent pipelines when no input is given
    table1          literature thresholds of the four theories

Every CSV starts with a header comment recording version, command, seed and
the parameter echo:

    # conpt 1.0.0 command=bethe seed=20210 grid=0:1:0.001 k=3 rules=conpt

Exit codes:
    0 success, 1 unexpected error, 2 parse/configuration/validation error,
    3 solver/reduction/fit failure, 4 I/O failure

Usage:
    $ python3 conpt.py table1 --k 3..10 --out table1.csv
    $ python3 conpt.py bethe --rules conpt --k 3 --grid 0:1:0.001 --out bethe.csv
    $ python3 conpt.py reduce --net tests/sample_data/heterogeneous.net --rules classical --runs 7 --seed 1
    $ CONPT_THREADS=4 python3 conpt.py lattice-sweep --rules conpt --lattice square --L 3..5 \\
          --grid 0.3:0.8:0.02 --out square.csv
    $ python3 conpt.py fit --mode crossing --in square.csv
"""

import argparse
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from modules import config
from modules import utilities
from modules.bethe import BetheSpec, bethe_exact, bethe_finite_curve, bethe_fixed_point
from modules.csv_reader import CurveCSVReader
from modules.exceptions import (BetheConvergenceError, ConfigurationError, ConPTError, ExportError,
                                FileSecurityError, FitError, NetworkFormatError, OracleLimitError,
                                ReductionError, SolverConvergenceError, StarTooLargeError,
                                ValidationError)
from modules.file_exporter import CSVExporter, TraceWriter
from modules.network import LatticeKind, LatticeSpec, Network, build_lattice, dilute
from modules.network_io import read_network_file
from modules.oracle import monte_carlo_sc, newman_ziff_curve
from modules.reduction import ReductionEngine
from modules.scaling import (TABLE1_2D_ROWS, Curve, bethe_cutoff_exponent, bethe_power_laws,
                             bethe_turning_exponent, estimate_threshold_crossing, fit_power_law,
                             kesten_exponent, literature_thresholds, theta_units, turning_point)
from modules.version import get_version
from modules.weights import LinkWeight, RuleSystem

__version__ = get_version()

Row = Dict[str, Any]

# Options that configure the run rather than its results; never echoed
RUNTIME_OPTIONS = frozenset({"command", "seed", "out", "log_file", "log_level", "no_log_timestamps"})

REQUIRED_PARAMETERS: Dict[str, Tuple[str, ...]] = {
    "reduce": ("net", "rules"),
    "bethe": ("rules", "k", "grid"),
    "lattice-sweep": ("rules", "lattice", "L", "grid"),
    "mc": ("grid",),
    "fit": ("mode",),
    "table1": ("k",),
}

# Fit modes that can run on the Bethe analytics without an input file
BETHE_FIT_MODES = frozenset({"cutoff", "turning", "power"})

PARSE_ERRORS = (ValidationError, NetworkFormatError, ConfigurationError)
SOLVER_ERRORS = (StarTooLargeError, SolverConvergenceError, ReductionError, BetheConvergenceError,
                 OracleLimitError, FitError)
IO_ERRORS = (FileSecurityError, ExportError, OSError)


# ============================================================================
# Run Configuration
# ============================================================================

@dataclass(frozen=True)
class RunConfig:
    """
    One invocation of the runner.

    Attributes:
        command: One of config.COMMANDS
        parameters: Command-specific options, echoed in every CSV header
        seed: Master seed; every random stream is derived from it
        out_path: Output CSV path, or None for standard output
    """
    command: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    seed: int = config.DEFAULT_SEED
    out_path: Optional[str] = None

    @classmethod
    def from_namespace(cls, args: argparse.Namespace) -> "RunConfig":
        parameters = {key: value for key, value in vars(args).items()
                      if key not in RUNTIME_OPTIONS and value is not None and value is not False}
        return cls(command=args.command, parameters=parameters, seed=args.seed, out_path=args.out)

    def get(self, key: str, default: Any = None) -> Any:
        return self.parameters.get(key, default)

    def validate(self) -> None:
        """
        Check that the command is known and its required parameters exist.

        Raises:
            ConfigurationError: On a missing or inconsistent parameter
        """
        if self.command not in config.COMMANDS:
            raise ConfigurationError(f"Unknown command: {self.command}", config_key="command",
                                     config_value=self.command)
        for key in REQUIRED_PARAMETERS[self.command]:
            if key not in self.parameters:
                raise ConfigurationError(f"Command '{self.command}' needs --{key.replace('_', '-')}",
                                         config_key=key)
        if self.command == "mc" and "net" not in self.parameters and not {"lattice", "L"} <= set(self.parameters):
            raise ConfigurationError("Command 'mc' needs --net or --lattice with --L", config_key="net")
        if self.command == "fit":
            mode = self.parameters["mode"]
            if "input" not in self.parameters and mode not in BETHE_FIT_MODES:
                raise ConfigurationError(f"Fit mode '{mode}' needs --in", config_key="input")
            if "input" not in self.parameters and "k" not in self.parameters:
                raise ConfigurationError("Bethe fits need --k", config_key="k")
            if mode in ("power", "kesten") and "input" in self.parameters and "x_th" not in self.parameters:
                raise ConfigurationError(f"Fit mode '{mode}' needs --x-th", config_key="x_th")
            if mode == "cutoff" and "input" in self.parameters:
                raise ConfigurationError("Fit mode 'cutoff' runs on the Bethe analytics only", config_key="input")
        if "f" in self.parameters and not 0.0 < self.parameters["f"] <= 1.0:
            raise ConfigurationError(config.ERROR_MESSAGES["bad_fraction"].format(value=self.parameters["f"]),
                                     config_key="f", config_value=self.parameters["f"])
        for key in ("runs", "trials", "n_max", "layers"):
            if key in self.parameters:
                low, high = config.VALIDATION_RULES[key]
                if not low <= self.parameters[key] <= high:
                    raise ConfigurationError(f"--{key.replace('_', '-')} must lie in [{int(low)}, {int(high)}]",
                                             config_key=key, config_value=self.parameters[key])

    def header(self) -> str:
        """Header comment line with version, command, seed and parameter echo."""
        echo = " ".join(f"{key}={value}" for key, value in sorted(self.parameters.items()))
        return f"# conpt {__version__} command={self.command} seed={self.seed} {echo}".rstrip()


def exit_code_for(error: BaseException) -> int:
    """Map an exception to the runner's exit status."""
    if isinstance(error, PARSE_ERRORS):
        return config.EXIT_CODES["parse"]
    if isinstance(error, SOLVER_ERRORS):
        return config.EXIT_CODES["solver"]
    if isinstance(error, IO_ERRORS):
        return config.EXIT_CODES["io"]
    return config.EXIT_CODES["unexpected"]


def _window_text(window: Tuple[float, float]) -> str:
    return f"{utilities.format_number(float(window[0]))}:{utilities.format_number(float(window[1]))}"


# ============================================================================
# Runner
# ============================================================================

class ConPTRunner:
    """
    Executes one RunConfig and writes its CSV.

    Each command handler returns (columns, rows, sort_keys); the runner
    writes them through CSVExporter so that outputs are sorted and renamed
    into place only on success.

    Example:
        >>> runner = ConPTRunner(RunConfig("table1", {"k": "3..4"}, out_path="table1.csv"))
        >>> runner.run()
        ['table1.csv']
    """

    def __init__(self, run_config: RunConfig, logger: Optional[logging.Logger] = None,
                 workers: Optional[int] = None):
        self.config = run_config
        self.logger = logger
        self.workers = workers
        self.exporter = CSVExporter(logger)
        self._trace: Optional[TraceWriter] = None

    def run(self) -> List[str]:
        """
        Validate the configuration, run the command and write its output.

        Returns:
            Paths of the files written (empty when writing to stdout)
        """
        self.config.validate()
        if self.logger:
            self.logger.info("=" * 80)
            self.logger.info(f"COMMAND {self.config.command}")
            self.logger.info("=" * 80)
            for key, value in sorted(self.config.parameters.items()):
                self.logger.info(f"{key}: {value}")
            self.logger.info(f"seed: {self.config.seed}")

        handler = getattr(self, "_run_" + self.config.command.replace("-", "_"))
        columns, rows, sort_keys = handler()

        written = []
        header = self.config.header()
        if self.config.out_path:
            written.append(self.exporter.write_rows(self.config.out_path, header, columns, rows, sort_keys))
        else:
            sys.stdout.write(self.exporter.render(header, columns, rows, sort_keys))
        if self.config.get("trace") and self._trace is not None:
            written.append(self._trace.write(self.config.get("trace"), header))

        if self.logger:
            self.logger.info("=" * 80)
            self.logger.info(f"Wrote {len(rows)} rows; files: {written or ['<stdout>']}")
            self.logger.info("=" * 80)
        return written

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    @property
    def rules(self) -> RuleSystem:
        return RuleSystem.parse(self.config.get("rules", "classical"))

    def _engine(self) -> ReductionEngine:
        return ReductionEngine(self.rules, tolerance=self.config.get("tol", config.DEFAULT_TOLERANCE),
                               n_max=self.config.get("n_max", config.DEFAULT_N_MAX),
                               strategy=self.config.get("order", config.DEFAULT_ORDER_STRATEGY),
                               logger=self.logger)

    def _grid(self) -> np.ndarray:
        grid = utilities.parse_grid(self.config.get("grid"))
        if grid[0] < 0.0 or grid[-1] > 1.0:
            raise ValidationError(f"Grid values must lie in [0, 1]: {self.config.get('grid')}",
                                  field_name="grid", field_value=self.config.get("grid"))
        return grid

    def _diluted(self, net: Network, identifier: Any) -> Network:
        """
        Apply --f to a network.

        One realization per network: the seed depends on the master seed and
        the network id only, so every grid point sees the same kept links.
        """
        f = self.config.get("f")
        if f is None:
            return net
        diluted = dilute(net, f, utilities.derive_seed(self.config.seed, config.DILUTION_SEED_STREAM,
                                                       hash_id(identifier)))
        if self.logger:
            self.logger.debug(f"Dilution f={f} kept {diluted.link_count} of {net.link_count} links of {identifier}")
        return diluted

    def _lattice_networks(self, weight: LinkWeight) -> List[Tuple[Any, str, Network]]:
        """(id, label, network) for every requested lattice size or the network file."""
        rules = self.rules.value
        if self.config.get("net"):
            path = self.config.get("net")
            stem = Path(path).stem
            net = read_network_file(path, self.logger).with_uniform_weight(weight)
            return [(stem, f"{rules}/{stem}/{len(net.nodes)}", self._diluted(net, stem))]
        kind = self.config.get("lattice")
        return [(size, f"{rules}/{kind}/{size}",
                 self._diluted(build_lattice(LatticeSpec(LatticeKind(kind), size), weight), size))
                for size in utilities.parse_int_range(str(self.config.get("L")))]

    # ------------------------------------------------------------------
    # Commands
    # ------------------------------------------------------------------

    def _run_reduce(self) -> Tuple[Sequence[str], List[Row], Sequence[str]]:
        path = self.config.get("net")
        net = self._diluted(read_network_file(path, self.logger), Path(path).stem)
        estimate = self._engine().sponge_crossing(net, self.config.get("runs", config.DEFAULT_RUNS),
                                                  self.config.seed, self.workers)
        self._trace = TraceWriter(self.logger)
        self._trace.extend(estimate.traces)
        row = {
            "id": Path(path).stem,
            "rules": self.rules.value,
            "runs": estimate.runs,
            "failed_runs": estimate.failed_runs,
            "mean": estimate.mean,
            "std": estimate.std,
            "theta": estimate.theta.theta,
        }
        return ("id", "rules", "runs", "failed_runs", "mean", "std", "theta"), [row], ("id",)

    def _run_bethe(self) -> Tuple[Sequence[str], List[Row], Sequence[str]]:
        ws = self._grid()
        layers = self.config.get("layers")
        averaging = self.config.get("averaging", "factor")
        rows = []
        for k in utilities.parse_int_range(str(self.config.get("k"))):
            spec = BetheSpec(k, self.config.get("f", 1.0), self.rules)
            if layers:
                values = bethe_finite_curve(spec, layers, ws, averaging)
            elif spec.f == 1.0:
                values = [bethe_exact(spec, w) for w in ws]
            else:
                values = [bethe_fixed_point(spec, w, averaging) for w in ws]
            if self.logger:
                self.logger.info(f"k={k}: {len(ws)} grid points, layers={layers or 'infinite'}")
            rows.extend({"rules": spec.rules.value, "k": k, "f": spec.f, "l": layers or 0,
                         "w": float(w), "value": float(value)} for w, value in zip(ws, values))
        return ("rules", "k", "f", "l", "w", "value"), rows, ("k", "w")

    def _run_lattice_sweep(self) -> Tuple[Sequence[str], List[Row], Sequence[str]]:
        grid = self._grid()
        engine = self._engine()
        runs = self.config.get("runs", config.DEFAULT_RUNS)
        rows = []
        for index, w in enumerate(grid):
            for size, label, net in self._lattice_networks(self.rules.weight_of(float(w))):
                estimate = engine.sponge_crossing(net, runs, utilities.derive_seed(self.config.seed, size, index),
                                                  self.workers)
                rows.append({"label": label, "L": size, "w": float(w), "mean": estimate.mean,
                             "std": estimate.std, "runs": estimate.runs, "failed_runs": estimate.failed_runs})
                if self.logger:
                    self.logger.info(f"{label} w={float(w)!r}: {estimate.mean:.6f} +- {estimate.std:.2e}")
        return ("label", "L", "w", "mean", "std", "runs", "failed_runs"), rows, ("L", "w")

    def _run_mc(self) -> Tuple[Sequence[str], List[Row], Sequence[str]]:
        grid = self._grid()
        trials = self.config.get("trials", config.DEFAULT_TRIALS)
        method = self.config.get("method", "union-find")
        rows = []
        if method == "newman-ziff":
            for identifier, label, net in self._lattice_networks(LinkWeight.maximal()):
                seed = utilities.derive_seed(self.config.seed, hash_id(identifier))
                curve = newman_ziff_curve(net, grid, trials, seed, self.workers)
                rows.extend({"label": label, "id": identifier, "p": float(p), "trials": trials,
                             "estimate": float(estimate), "stderr": float(stderr)}
                            for p, estimate, stderr in zip(curve.ps, curve.estimates, curve.stderrs))
        else:
            for index, p in enumerate(grid):
                for identifier, label, net in self._lattice_networks(LinkWeight.from_p(float(p))):
                    seed = utilities.derive_seed(self.config.seed, hash_id(identifier), index)
                    sample = monte_carlo_sc(net, trials, seed, self.workers)
                    rows.append({"label": label, "id": identifier, "p": float(p), "trials": trials,
                                 "estimate": sample.estimate, "stderr": sample.stderr})
        if self.logger:
            self.logger.info(f"Monte Carlo ({method}): {len(rows)} points, {trials} trials each")
        return ("label", "id", "p", "trials", "estimate", "stderr"), rows, ("label", "p")

    def _run_fit(self) -> Tuple[Sequence[str], List[Row], Sequence[str]]:
        mode = self.config.get("mode")
        window = utilities.parse_window(self.config.get("window")) if self.config.get("window") else None
        rows = self._bethe_fit(mode, window) if not self.config.get("input") else self._curve_fit(mode, window)
        return ("quantity", "value", "stderr", "window"), rows, ("quantity",)

    def _curve_fit(self, mode: str, window: Optional[Tuple[float, float]]) -> List[Row]:
        curves = CurveCSVReader(self.logger).read_curves(self.config.get("input"))
        families: Dict[str, List[Curve]] = {}
        for curve in curves:
            families.setdefault(f"{curve.label.rules}/{curve.label.lattice}", []).append(curve)

        rows = []
        x_th = self.config.get("x_th")
        for family, members in sorted(families.items()):
            span = (min(c.xs[0] for c in members), max(c.xs[-1] for c in members))
            if mode == "crossing":
                estimate = estimate_threshold_crossing(members)
                rules = members[0].label.rules
                low, high = estimate.value - estimate.uncertainty, estimate.value + estimate.uncertainty
                rows.append({"quantity": f"threshold:{family}", "value": estimate.value,
                             "stderr": estimate.uncertainty, "window": _window_text(span)})
                rows.append({"quantity": f"threshold_theta_units:{family}",
                             "value": theta_units(estimate.value, rules),
                             "stderr": (theta_units(min(high, 1.0), rules) - theta_units(max(low, 0.0), rules)) / 2.0,
                             "window": _window_text(span)})
            elif mode == "turning":
                for curve in members:
                    rows.append({"quantity": f"turning:{curve.label}", "value": turning_point(curve),
                                 "stderr": float(curve.xs[1] - curve.xs[0]),
                                 "window": _window_text((curve.xs[0], curve.xs[-1]))})
            elif mode == "power":
                for curve in members:
                    above = curve.xs > x_th
                    fit = fit_power_law(curve.xs[above] - x_th, curve.ys[above], window)
                    rows.append({"quantity": f"exponent:{curve.label}", "value": fit.exponent,
                                 "stderr": fit.stderr, "window": _window_text(fit.window)})
            elif mode == "kesten":
                distances = window or (0.0, math.inf)
                fit = kesten_exponent(members, x_th, distances[0], distances[1])
                rows.append({"quantity": f"nu:{family}", "value": fit.exponent, "stderr": fit.stderr,
                             "window": _window_text(fit.window)})
        return rows

    def _bethe_fit(self, mode: str, window: Optional[Tuple[float, float]]) -> List[Row]:
        rows = []
        for k in utilities.parse_int_range(str(self.config.get("k"))):
            if mode == "cutoff":
                fit = bethe_cutoff_exponent(k, window or config.DEFAULT_CUTOFF_WINDOW)
                fits = {f"z_nu:bethe-{k}": fit}
            elif mode == "turning":
                fits = {f"inverse_z_nu:bethe-{k}": bethe_turning_exponent(k)}
            else:
                slopes = bethe_power_laws(k, window or config.DEFAULT_THRESHOLD_WINDOW)
                fits = {f"{name}_slope:bethe-{k}": fit for name, fit in slopes.items()}
            rows.extend({"quantity": quantity, "value": fit.exponent, "stderr": fit.stderr,
                         "window": _window_text(fit.window)} for quantity, fit in fits.items())
            if self.logger:
                for quantity, fit in fits.items():
                    self.logger.info(f"{quantity} = {fit.exponent:.4f} +- {fit.stderr:.4f}")
        return rows

    def _run_table1(self) -> Tuple[Sequence[str], List[Row], Sequence[str]]:
        rows = []
        for k in utilities.parse_int_range(str(self.config.get("k"))):
            row = literature_thresholds(k)
            rows.extend({"lattice": "bethe", "k": k, "theory": theory, "threshold": value}
                        for theory, value in row.as_dict().items())
        if self.config.get("with_2d"):
            for name, row in TABLE1_2D_ROWS.items():
                rows.extend({"lattice": name, "k": config.LATTICE_COORDINATION[name], "theory": theory,
                             "threshold": value} for theory, value in row.as_dict().items())
        return ("lattice", "k", "theory", "threshold"), rows, ("lattice", "k", "theory")


def hash_id(identifier: Any) -> int:
    """Integer seed part for a lattice size or a network name."""
    if isinstance(identifier, int):
        return identifier
    return int(utilities.stable_hash([identifier], length=8), 16)


# ============================================================================
# Argument Parsing
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser with one subparser per command."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=config.DEFAULT_SEED,
                        help=f"Master seed (default: {config.DEFAULT_SEED})")
    common.add_argument("--out", type=str, default=None, help="Output CSV path (default: stdout)")
    common.add_argument("--log-file", type=str, default=None, help="Write a log to this file")
    common.add_argument("--log-level", type=str, default=config.DEFAULT_LOG_LEVEL,
                        choices=sorted(config.LOG_LEVELS), help="Log level (default: INFO)")
    common.add_argument("--no-log-timestamps", action="store_true",
                        help="Disable date/time stamps in log entries")

    reduction = argparse.ArgumentParser(add_help=False)
    reduction.add_argument("--rules", type=str, choices=sorted(config.RULE_NAMES), default=None)
    reduction.add_argument("--runs", type=int, default=None,
                           help=f"Randomized degradation orders (default: {config.DEFAULT_RUNS})")
    reduction.add_argument("--tol", type=float, default=None,
                           help=f"Star-mesh tolerance (default: {config.DEFAULT_TOLERANCE})")
    reduction.add_argument("--n-max", type=int, default=None,
                           help=f"Largest star solved (default: {config.DEFAULT_N_MAX})")
    reduction.add_argument("--order", type=str, choices=sorted(config.ORDER_STRATEGIES), default=None,
                           help="Degradation order strategy (default: random)")
    reduction.add_argument("--f", type=float, default=None,
                           help="Retained link fraction; links are diluted once per network (default: 1)")

    parser = argparse.ArgumentParser(prog="conpt", description="Concurrence percolation toolkit")
    parser.add_argument("--version", action="version", version=f"conpt {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    reduce_cmd = commands.add_parser("reduce", parents=[common, reduction],
                                     help="Sponge crossing of a network file")
    reduce_cmd.add_argument("--net", type=str, default=None, help="Network file")
    reduce_cmd.add_argument("--trace", type=str, default=None, help="Per-run trace CSV path")

    bethe_cmd = commands.add_parser("bethe", parents=[common], help="Bethe-lattice curves")
    bethe_cmd.add_argument("--rules", type=str, choices=sorted(config.RULE_NAMES), default=None)
    bethe_cmd.add_argument("--k", type=str, default=None, help="Degree or range a..b")
    bethe_cmd.add_argument("--f", type=float, default=None, help="Retained link fraction (default: 1)")
    bethe_cmd.add_argument("--layers", type=int, default=None, help="Finite layer count (default: infinite)")
    bethe_cmd.add_argument("--grid", type=str, default=None, help="start:stop:step in p or c")
    bethe_cmd.add_argument("--averaging", type=str, choices=["factor", "value"], default=None,
                           help="Dilution average (default: factor)")

    sweep_cmd = commands.add_parser("lattice-sweep", parents=[common, reduction],
                                    help="Reduction sweep over 2D lattices")
    sweep_cmd.add_argument("--lattice", type=str, choices=sorted(config.LATTICE_KINDS), default=None)
    sweep_cmd.add_argument("--L", type=str, default=None, help="Size or range a..b")
    sweep_cmd.add_argument("--grid", type=str, default=None, help="start:stop:step in p or c")

    mc_cmd = commands.add_parser("mc", parents=[common], help="Classical Monte Carlo")
    mc_cmd.add_argument("--net", type=str, default=None, help="Network file (weights replaced by p)")
    mc_cmd.add_argument("--lattice", type=str, choices=sorted(config.LATTICE_KINDS), default=None)
    mc_cmd.add_argument("--L", type=str, default=None, help="Size or range a..b")
    mc_cmd.add_argument("--f", type=float, default=None,
                        help="Retained link fraction; links are diluted once per network (default: 1)")
    mc_cmd.add_argument("--grid", type=str, default=None, help="start:stop:step in p")
    mc_cmd.add_argument("--trials", type=int, default=None,
                        help=f"Trials per point (default: {config.DEFAULT_TRIALS})")
    mc_cmd.add_argument("--method", type=str, choices=sorted(config.MC_METHODS), default=None,
                        help="union-find per point or one newman-ziff pass (default: union-find)")

    fit_cmd = commands.add_parser("fit", parents=[common], help="Thresholds and exponents")
    fit_cmd.add_argument("--mode", type=str, choices=sorted(config.FIT_MODES), default=None)
    fit_cmd.add_argument("--in", dest="input", type=str, default=None, help="Curve CSV (label,x,y)")
    fit_cmd.add_argument("--window", type=str, default=None, help="Fit window a:b")
    fit_cmd.add_argument("--x-th", type=float, default=None, help="Threshold for power and kesten fits")
    fit_cmd.add_argument("--k", type=str, default=None, help="Bethe degree or range for fits without --in")

    table_cmd = commands.add_parser("table1", parents=[common], help="Literature thresholds")
    table_cmd.add_argument("--k", type=str, default=None, help="Degree or range a..b")
    table_cmd.add_argument("--with-2d", action="store_true", help="Append the quoted 2D lattice rows")

    return parser


# ============================================================================
# Main Entry Point
# ============================================================================

def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments, run the command and return the exit status.
    """
    args = build_parser().parse_args(argv)
    logger = None
    if args.log_file:
        log_path = os.path.abspath(args.log_file)
        logger = utilities.setup_logging(os.path.dirname(log_path), True, args.log_level,
                                         args.no_log_timestamps, os.path.basename(log_path))

    try:
        run_config = RunConfig.from_namespace(args)
        ConPTRunner(run_config, logger).run()
    except ConPTError as e:
        print(f"Error: {e}", file=sys.stderr)
        if logger:
            logger.error(str(e))
        return exit_code_for(e)
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        if logger:
            logger.error(f"I/O error: {e}", exc_info=True)
        return config.EXIT_CODES["io"]
    return config.EXIT_CODES["success"]


if __name__ == '__main__':
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("Interrupted", file=sys.stderr)
        sys.exit(config.EXIT_CODES["unexpected"])
