#!/usr/bin/env python3
"""
ConPT Common Utility Module

General-purpose helpers shared by the command-line runner and the
computational modules.

Key Functions:
    - setup_logging: Configure the named file logger for a run
    - parse_grid: Parse start:stop:step sweep grids
    - parse_int_range: Parse a..b integer ranges
    - parse_window: Parse a:b fit windows
    - stable_hash: Short deterministic digest of a sequence
    - derive_seed: Deterministic child seeds for runs, steps and blocks
    - format_number: Canonical text form of floats in output files
"""

import sys
import os
import hashlib
import logging
from typing import Iterable, List, Optional, Tuple

import numpy as np

from modules import config
from modules.exceptions import ValidationError


def setup_logging(output_path: str, enable_logging: bool, log_level: str = "INFO",
                  disable_log_timestamps: bool = False,
                  log_filename: Optional[str] = None) -> Optional[logging.Logger]:
    """
    Setup logging to file if enabled by user.

    Args:
        output_path: Directory where log file will be created
        enable_logging: Whether to enable logging (True) or disable (False)
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        disable_log_timestamps: Drop date/time stamps from log entries
        log_filename: Log file name, defaults to config.LOG_FILENAME

    Returns:
        Logger instance if logging is enabled, None otherwise

    Implementation Notes:
        - Uses named logger 'ConPT' instead of root logger
        - Removes existing handlers to prevent duplicates on re-runs
        - Prevents propagation to root logger
        - Log mode is overwrite: one log per run

    Examples:
        >>> logger = setup_logging("/tmp", True)
        >>> logger.info("Sweep started")
        # Log entry: 2024-01-25 14:30:15,120 - INFO - Sweep started
    """
    if not enable_logging:
        return None

    log_file = os.path.join(output_path, log_filename or config.LOG_FILENAME)

    try:
        logger = logging.getLogger('ConPT')
        level = config.LOG_LEVELS.get(log_level.upper(), logging.INFO)
        logger.setLevel(level)

        if logger.handlers:
            for handler in logger.handlers[:]:
                logger.removeHandler(handler)
                handler.close()

        custom_format = (config.LOG_DEFAULT_FORMAT if disable_log_timestamps
                         else config.LOG_TIMESTAMPS_FORMAT)

        file_handler = logging.FileHandler(log_file, mode='w', encoding='utf-8')
        file_handler.setLevel(level)
        file_handler.setFormatter(logging.Formatter(custom_format))
        logger.addHandler(file_handler)

        logger.propagate = False

        logger.info("=" * 80)
        logger.info("ConPT run started")
        logger.info(f"Log file: {log_file}")
        logger.info("=" * 80)

        return logger
    except Exception as e:
        print(f"Warning: Failed to setup logging: {e}", file=sys.stderr)
        return None


def parse_grid(text: str) -> np.ndarray:
    """
    Parse a start:stop:step grid.

    The grid starts at start and steps by step; stop is excluded unless it
    lands on the grid (within 1e-9 of a step).

    Examples:
        >>> parse_grid("0:1:0.25").tolist()
        [0.0, 0.25, 0.5, 0.75, 1.0]
        >>> parse_grid("0:0.9:0.25").tolist()
        [0.0, 0.25, 0.5, 0.75]
    """
    try:
        start, stop, step = (float(part) for part in text.split(":"))
    except ValueError as e:
        raise ValidationError(config.ERROR_MESSAGES["bad_grid"].format(grid=text),
                              field_name="grid", field_value=text) from e
    if step <= 0 or stop < start:
        raise ValidationError(config.ERROR_MESSAGES["bad_grid"].format(grid=text),
                              field_name="grid", field_value=text)

    span = (stop - start) / step
    count = int(np.floor(span + 1e-9))
    values = start + step * np.arange(count + 1)
    if abs(values[-1] - stop) >= 1e-9 * step and values[-1] > stop:
        values = values[:-1]
    # Twelve decimals keeps grid text stable across platforms
    return np.round(values, 12)


def parse_int_range(text: str) -> List[int]:
    """
    Parse "a..b" (inclusive) or a single integer.

    Examples:
        >>> parse_int_range("3..5")
        [3, 4, 5]
        >>> parse_int_range("4")
        [4]
    """
    try:
        if ".." in text:
            low, high = (int(part) for part in text.split(".."))
        else:
            low = high = int(text)
    except ValueError as e:
        raise ValidationError(config.ERROR_MESSAGES["bad_range"].format(text=text),
                              field_name="range", field_value=text) from e
    if high < low:
        raise ValidationError(config.ERROR_MESSAGES["bad_range"].format(text=text),
                              field_name="range", field_value=text)
    return list(range(low, high + 1))


def parse_window(text: str) -> Tuple[float, float]:
    """Parse an "a:b" window with a < b."""
    try:
        low, high = (float(part) for part in text.split(":"))
    except ValueError as e:
        raise ValidationError(f"Window must be a:b: {text}",
                              field_name="window", field_value=text) from e
    if not low < high:
        raise ValidationError(f"Window must satisfy a < b: {text}",
                              field_name="window", field_value=text)
    return low, high


def stable_hash(items: Iterable, length: int = 12) -> str:
    """
    Deterministic short digest of a sequence (used for degradation orders).

    MD5 is used for speed; the digest only labels trace records.
    """
    text = ",".join(str(item) for item in items)
    return hashlib.md5(text.encode()).hexdigest()[:length]


def derive_seed(*parts: int) -> int:
    """
    Derive a child seed from integer parts via numpy's SeedSequence.

    The same parts always give the same 32-bit seed.
    """
    sequence = np.random.SeedSequence([int(part) & 0xFFFFFFFF for part in parts])
    return int(sequence.generate_state(1)[0])


def format_number(value) -> str:
    """
    Canonical text for a CSV field.

    Integers are written as-is, floats with repr() so that reading the file
    back returns the identical double.
    """
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def is_finite_number(value) -> bool:
    """True for finite ints/floats, False for NaN/Inf; non-numbers pass."""
    if isinstance(value, (float, np.floating)):
        return bool(np.isfinite(value))
    return True
