#!/usr/bin/env python3
"""
Constants and configuration for the ConPT percolation toolkit.
"""

import math
from typing import Dict, FrozenSet, Final, List, Set, Tuple

# Geometry of link weights
THETA_MAX: Final[float] = math.pi / 4
SNAP_EPSILON: float = 1e-12

# Default Configuration
DEFAULT_SEED: int = 20210
DEFAULT_RUNS: int = 7
DEFAULT_TRIALS: int = 50000
DEFAULT_LOG_LEVEL: str = "INFO"
DEFAULT_FILE_ENCODING: str = "autodetect"
DEFAULT_ORDER_STRATEGY: str = "random"

# Star-mesh solver
DEFAULT_TOLERANCE: float = 1e-9
STEP_TOLERANCE: float = 1e-12
FINITE_DIFFERENCE_STEP: float = 1e-6
MAX_SOLVER_ITERATIONS: int = 200
MAX_SOLVER_RESTARTS: int = 5
RESTART_THETA_RANGE: Tuple[float, float] = (0.1, math.pi / 4 - 0.1)
DEFAULT_N_MAX: int = 11
MAX_BACKTRACK_STEPS: int = 8
# Broyden iterates to this fraction of the tolerance so the independent
# re-evaluation of the returned mesh stays below the tolerance itself
SOLVER_TARGET_FRACTION: float = 0.5
# Nested solves must be tighter than the outer finite differences can resolve
NESTED_TOLERANCE_FACTOR: float = 1e-2
NESTED_TOLERANCE_FLOOR: float = 1e-13

# Bethe analytics
BETHE_DAMPING: float = 0.5
BETHE_ZERO_FLOOR: float = 1e-14
BETHE_CONVERGENCE: float = 1e-15
BETHE_MAX_ITERATIONS: int = 20000
BETHE_POLISH_AFTER: int = 2000

# Classical oracle
BRUTE_FORCE_MAX_LINKS: int = 24
BRUTE_FORCE_CHUNK: int = 1 << 16
MC_BLOCK_SIZE: int = 5000
# Seed stream for link dilution, kept apart from the per-run streams
DILUTION_SEED_STREAM: int = 0xD11

# Scaling analysis
ROOT_SCAN_POINTS: int = 1000
ROOT_TOLERANCE: float = 1e-12
MIN_TURNING_POINTS: int = 7
MIN_CORRELATION_SIZES: int = 3
DEFAULT_CUTOFF_WINDOW: Tuple[float, float] = (1e-5, 1e-3)
DEFAULT_THRESHOLD_WINDOW: Tuple[float, float] = (1e-6, 1e-3)
DEFAULT_SATURATION_WINDOW: Tuple[float, float] = (1e-4, 1e-2)

# Parallelism
THREADS_ENV_VAR: str = "CONPT_THREADS"

# Cache Settings
MAX_CACHE_SIZE: int = 4096

# Default Paths
LOG_FILENAME: str = "conpt.log"

# File Security
MAX_FILE_SIZE: int = 100 * 1024 * 1024  # 100MB
ALLOWED_NETWORK_EXTENSIONS: Set[str] = {".net", ".txt"}
ALLOWED_CSV_EXTENSIONS: Set[str] = {".csv"}

# Validation Rules
VALIDATION_RULES: Dict[str, Tuple[float, float]] = {
    "k": (3, 64),
    "L": (2, 256),
    "layers": (1, 10_000_000),
    "runs": (1, 10_000),
    "trials": (1, 100_000_000),
    "n_max": (2, 16),
}

# Enumerations
RULE_NAMES: Final[FrozenSet[str]] = frozenset({"classical", "conpt"})
LATTICE_KINDS: Final[FrozenSet[str]] = frozenset({"square", "honeycomb", "triangular"})
REGIMES: Final[FrozenSet[str]] = frozenset({"sub", "super"})
ORDER_STRATEGIES: Final[FrozenSet[str]] = frozenset({"random", "min-degree"})
MC_METHODS: Final[FrozenSet[str]] = frozenset({"union-find", "newman-ziff"})
FIT_MODES: Final[FrozenSet[str]] = frozenset({"crossing", "turning", "power", "kesten", "cutoff"})
COMMANDS: Final[FrozenSet[str]] = frozenset({
    "reduce", "bethe", "lattice-sweep", "mc", "fit", "table1"
})

# Coordination number of each 2D lattice (k column of the threshold table)
LATTICE_COORDINATION: Dict[str, int] = {"square": 4, "honeycomb": 3, "triangular": 6}

# Threshold table, 2D rows in theta-units (CEP, QEP, QEP-GHZ, ConPT)
TABLE1_2D: Dict[str, Tuple[float, float, float, str]] = {
    "square": (0.670, 0.670, 0.584, "0.42(8)"),
    "honeycomb": (0.777, 0.761, 0.745, "0.51(8)"),
    "triangular": (0.545, 0.545, 0.481, "0.32(8)"),
}

# Encoding Configuration
SUPPORTED_ENCODINGS: List[str] = [
    "utf-8", "utf-8-sig", "utf-16", "utf-16-le", "utf-16-be",
    "cp1252", "iso-8859-1", "latin-1", "ascii"
]

ENCODING_MAP: Dict[str, str] = {
    'utf8': 'utf-8',
    'utf16': 'utf-16',
    'ascii': 'utf-8',  # ASCII is subset of UTF-8
    'windows1252': 'cp1252',
    'cp1252': 'cp1252',
    'iso88591': 'iso-8859-1',
    'latin1': 'latin-1'
}

# Logging Configuration
LOG_TIMESTAMPS_FORMAT: str = "%(asctime)s - %(levelname)s - %(message)s"
LOG_DEFAULT_FORMAT: str = "%(levelname)s - %(message)s"
LOG_LEVELS: Dict[str, int] = {
    "DEBUG": 10,
    "INFO": 20,
    "WARNING": 30,
    "ERROR": 40,
    "CRITICAL": 50
}

# Exit codes of the command-line runner
EXIT_CODES: Dict[str, int] = {
    "success": 0,
    "unexpected": 1,
    "parse": 2,
    "solver": 3,
    "io": 4,
}

# Error Messages
ERROR_MESSAGES: Dict[str, str] = {
    "theta_range": "Link angle out of range [0, pi/4]: {value}",
    "measure_range": "{measure} out of range [0, 1]: {value}",
    "empty_composition": "Cannot compose an empty list of weights",
    "unknown_rules": "Unknown rule system: {name}",
    "unknown_node": "Unknown node {node} in {record}",
    "duplicate_node": "Duplicate node declaration: {node}",
    "duplicate_boundary": "Node {node} listed more than once in the boundaries",
    "bad_record": "Unrecognised record '{record}'",
    "bad_number": "Cannot parse '{token}' as {kind}",
    "missing_boundary": "Network has no boundary {side}",
    "bad_fraction": "Retained fraction must lie in (0, 1]: {value}",
    "star_too_large": "Star of size {size} exceeds n_max={limit}",
    "solver_failed": "Star-mesh solve did not converge (best residual {residual:.3e})",
    "terminal_degrade": "Terminal node {node} cannot be degraded",
    "bad_order": "Order must be a permutation of the non-terminal nodes",
    "no_runs": "All {runs} reduction runs failed",
    "bethe_failed": "Bethe fixed point did not converge after {iterations} iterations",
    "too_many_links": "Brute force needs at most {limit} links, network has {links}",
    "no_crossing": "No sign change between curves {a} and {b}",
    "no_turning": "Second derivative never changes sign on {label}",
    "nonpositive_fit": "Non-positive data inside fit window {window}",
    "non_monotone": "Values do not decay monotonically with size",
    "file_not_found": "File not found: {path}",
    "file_too_large": "File too large: {size} bytes (max: {max_size})",
    "invalid_extension": "Invalid file extension: {ext}",
    "non_finite": "Refusing to write non-finite value in column {column}",
    "export_failed": "Export failed: {error}",
    "invalid_encoding": "Could not detect encoding, falling back to utf-8",
    "bad_grid": "Grid must be start:stop:step with step > 0: {grid}",
    "bad_range": "Range must be a..b or a single integer: {text}",
}
