#!/usr/bin/env python3
"""
Threshold and exponent extraction.

Primitives:
    estimate_threshold_crossing  crossing points of adjacent-size curves
    turning_point                zero of the second derivative of one curve
    fit_power_law                log-log least squares inside a window
    correlation_length           xi from the exponential decay with size
    cutoff_layer                 l* from C ~ l^(-1/2) exp(-l / l*)
    kesten_exponent              nu from xi(|x - x_th|) on both sides

Pipelines on the Bethe analytics:
    bethe_cutoff_exponent   z nu from l* below threshold
    bethe_turning_exponent  1/(z nu) from finite-l turning points
    bethe_power_laws        slopes near threshold and near saturation

Threshold table:
    literature_thresholds, theta_units, TABLE1_2D_ROWS

All fits are pure functions of their inputs; fit windows are explicit and
are echoed in every result.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize, stats

from modules import config
from modules.bethe import (BetheSpec, bethe_exact, bethe_finite_curve, bethe_layer_profile,
                           bethe_saturation_deficit, bethe_thresholds)
from modules.exceptions import FitError, ValidationError
from modules.weights import RuleSystem

logger = logging.getLogger(__name__)

Window = Tuple[float, float]


# ============================================================================
# Result types
# ============================================================================

@dataclass(frozen=True, order=True)
class CurveLabel:
    """Rules, lattice kind and size of a curve, written rules/lattice/size."""
    size: int
    rules: str
    lattice: str

    @classmethod
    def parse(cls, text: str) -> "CurveLabel":
        """
        Examples:
            >>> CurveLabel.parse("conpt/square/4")
            CurveLabel(size=4, rules='conpt', lattice='square')
        """
        parts = text.strip().split("/")
        if len(parts) != 3:
            raise ValidationError(f"Curve label must be rules/lattice/size: {text}", field_name="label",
                                  field_value=text)
        rules, lattice, size = parts
        try:
            return cls(size=int(size), rules=RuleSystem.parse(rules).value, lattice=lattice)
        except ValueError as e:
            raise ValidationError(f"Curve size must be an integer: {text}", field_name="label",
                                  field_value=text) from e

    def __str__(self) -> str:
        return f"{self.rules}/{self.lattice}/{self.size}"


@dataclass(frozen=True)
class Curve:
    xs: np.ndarray
    ys: np.ndarray
    label: CurveLabel

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
            raise ValidationError(f"Curve {self.label} needs matching xs and ys with 2+ points",
                                  field_name="xs", field_value=xs.size)
        if np.any(np.diff(xs) <= 0.0):
            raise ValidationError(f"Curve {self.label} xs must be strictly increasing", field_name="xs")
        if not np.all(np.isfinite(ys)) or np.any((ys < 0.0) | (ys > 1.0)):
            raise ValidationError(f"Curve {self.label} ys must lie in [0, 1]", field_name="ys")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    def at(self, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """Linear interpolation inside the grid."""
        return np.interp(x, self.xs, self.ys)


@dataclass(frozen=True)
class ScalingFit:
    """
    Result of a straight-line fit in log-log space.

    exponent is the fitted slope unless the producing function says it
    reports the negated slope.
    """
    exponent: float
    intercept: float
    stderr: float
    window: Window


@dataclass(frozen=True)
class CorrelationLength:
    xi: float
    stderr: float
    intercept: float
    window: Window


@dataclass(frozen=True)
class ThresholdEstimate:
    value: float
    uncertainty: float
    crossings: Tuple[float, ...]


@dataclass(frozen=True)
class ThresholdRow:
    """One threshold-table row in theta-units; 2D ConPT entries are quoted strings."""
    label: str
    cep: float
    qep: float
    qep_ghz: float
    conpt: Union[float, str]

    def as_dict(self) -> Dict[str, Union[float, str]]:
        return {"CEP": self.cep, "QEP": self.qep, "QEP-GHZ": self.qep_ghz, "ConPT": self.conpt}


# ============================================================================
# Crossings and turning points
# ============================================================================

def _sign_brackets(values: np.ndarray) -> List[Tuple[int, int]]:
    """Index pairs (i, j) of consecutive nonzero entries with opposite signs."""
    nonzero = np.flatnonzero(values != 0.0)
    signs = np.sign(values[nonzero])
    flips = np.flatnonzero(signs[1:] != signs[:-1])
    return [(int(nonzero[f]), int(nonzero[f + 1])) for f in flips]


def _pair_crossing(small: Curve, large: Curve) -> float:
    low, high = max(small.xs[0], large.xs[0]), min(small.xs[-1], large.xs[-1])
    grid = np.union1d(small.xs, large.xs)
    grid = grid[(grid >= low) & (grid <= high)]
    if grid.size < 2:
        raise FitError(config.ERROR_MESSAGES["no_crossing"].format(a=small.label, b=large.label),
                       quantity="crossing")

    def difference(x: float) -> float:
        return float(small.at(x) - large.at(x))

    diffs = np.array([difference(x) for x in grid])
    brackets = _sign_brackets(diffs)
    if not brackets:
        exact = np.flatnonzero(diffs == 0.0)
        interior = [i for i in exact if 0 < i < grid.size - 1 and diffs[i - 1] * diffs[i + 1] < 0.0]
        if interior:
            return float(grid[interior[0]])
        raise FitError(config.ERROR_MESSAGES["no_crossing"].format(a=small.label, b=large.label),
                       quantity="crossing")
    # The transversal crossing is the bracket with the largest jump; noisy
    # tails near 0 or 1 only produce small ones.
    i, j = max(brackets, key=lambda pair: abs(diffs[pair[0]]) + abs(diffs[pair[1]]))
    return float(optimize.bisect(difference, grid[i], grid[j], xtol=config.ROOT_TOLERANCE))


def estimate_threshold_crossing(curves: Sequence[Curve]) -> ThresholdEstimate:
    """
    Threshold from the crossing points of adjacent-size curves.

    Returns the mean crossing with half the spread across pairs as its
    uncertainty.

    Raises:
        FitError: If fewer than two sizes are given or a pair never crosses
    """
    ordered = sorted(curves, key=lambda curve: curve.label.size)
    sizes = [curve.label.size for curve in ordered]
    if len(ordered) < 2 or len(set(sizes)) != len(sizes):
        raise FitError(f"Need 2+ curves of distinct sizes, got sizes {sizes}", quantity="crossing")
    crossings = tuple(_pair_crossing(small, large) for small, large in zip(ordered, ordered[1:]))
    logger.debug(f"Crossings for sizes {sizes}: {crossings}")
    value = float(np.mean(crossings))
    spread = (max(crossings) - min(crossings)) / 2.0
    return ThresholdEstimate(value=value, uncertainty=float(spread), crossings=crossings)


def turning_point(curve: Curve) -> float:
    """
    Inflection point of a curve on a uniform grid.

    The second derivative comes from central differences; its first change
    from positive to negative is located by bisection on the linear
    interpolant.

    Raises:
        FitError: If the grid is short or non-uniform or no sign change exists
    """
    xs, ys = curve.xs, curve.ys
    if xs.size < config.MIN_TURNING_POINTS:
        raise FitError(f"Turning point needs {config.MIN_TURNING_POINTS}+ points on {curve.label}",
                       quantity="turning")
    steps = np.diff(xs)
    if not np.allclose(steps, steps[0], rtol=1e-6, atol=0.0):
        raise FitError(f"Turning point needs a uniform grid on {curve.label}", quantity="turning")
    step = float(np.mean(steps))
    second = (ys[2:] - 2.0 * ys[1:-1] + ys[:-2]) / (step * step)
    inner = xs[1:-1]

    downward = [(i, j) for i, j in _sign_brackets(second) if second[i] > 0.0]
    if not downward:
        raise FitError(config.ERROR_MESSAGES["no_turning"].format(label=curve.label), quantity="turning")
    i, j = downward[0]

    def interpolated(x: float) -> float:
        return float(np.interp(x, inner[i:j + 1], second[i:j + 1]))

    return float(optimize.bisect(interpolated, inner[i], inner[j], xtol=config.ROOT_TOLERANCE))


# ============================================================================
# Fits
# ============================================================================

def _window_mask(xs: np.ndarray, window: Optional[Window]) -> Tuple[np.ndarray, Window]:
    if window is None:
        return np.ones(xs.size, dtype=bool), (float(np.min(xs)), float(np.max(xs)))
    low, high = window
    if not low < high:
        raise ValidationError(f"Fit window must satisfy low < high: {window}", field_name="window",
                              field_value=window)
    return (xs >= low) & (xs <= high), (float(low), float(high))


def fit_power_law(xs: Sequence[float], ys: Sequence[float], window: Optional[Window] = None) -> ScalingFit:
    """
    Least-squares line through (ln x, ln y) for x inside the window.

    Examples:
        >>> fit = fit_power_law([1, 2, 4, 8], [3, 12, 48, 192])
        >>> round(fit.exponent, 12)
        2.0

    Raises:
        FitError: If data inside the window is non-positive or too sparse
    """
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    mask, window = _window_mask(xs, window)
    x, y = xs[mask], ys[mask]
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise FitError(config.ERROR_MESSAGES["nonpositive_fit"].format(window=window), quantity="power_law")
    if x.size < 2 or np.unique(x).size < 2:
        raise FitError(f"Need 2+ distinct points inside fit window {window}", quantity="power_law")
    result = stats.linregress(np.log(x), np.log(y))
    stderr = float(result.stderr) if x.size > 2 else 0.0
    return ScalingFit(exponent=float(result.slope), intercept=float(result.intercept),
                      stderr=stderr, window=window)


def _decay_length(xs: np.ndarray, ys: np.ndarray, window: Window, quantity: str) -> CorrelationLength:
    """Length scale from ln y = a - x / length."""
    result = stats.linregress(xs, np.log(ys))
    if result.slope >= 0.0:
        raise FitError(config.ERROR_MESSAGES["non_monotone"], quantity=quantity)
    length = -1.0 / result.slope
    stderr = float(result.stderr) / (result.slope * result.slope) if xs.size > 2 else 0.0
    return CorrelationLength(xi=float(length), stderr=stderr, intercept=float(result.intercept), window=window)


def correlation_length(values: Mapping[int, float], regime: str = "sub",
                       window: Optional[Window] = None) -> CorrelationLength:
    """
    Correlation length from the exponential decay of crossing values with size.

    Below threshold P ~ exp(-L/xi); above it 1 - P ~ exp(-L/xi).

    Examples:
        >>> values = {L: math.exp(-L / 3.5) for L in (4, 8, 12, 16)}
        >>> round(correlation_length(values, "sub").xi, 9)
        3.5

    Raises:
        FitError: If fewer than three sizes are given or the decay is not monotone
    """
    if regime not in config.REGIMES:
        raise ValidationError(f"Regime must be one of {sorted(config.REGIMES)}", field_name="regime",
                              field_value=regime)
    sizes = np.array(sorted(values), dtype=float)
    mask, window = _window_mask(sizes, window)
    sizes = sizes[mask]
    if sizes.size < config.MIN_CORRELATION_SIZES:
        raise FitError(f"Need {config.MIN_CORRELATION_SIZES}+ sizes, got {sizes.size}", quantity="xi")
    raw = np.array([values[int(size)] for size in sizes], dtype=float)
    decaying = raw if regime == "sub" else 1.0 - raw
    if np.any(decaying <= 0.0) or np.any(np.diff(decaying) >= 0.0):
        raise FitError(config.ERROR_MESSAGES["non_monotone"], quantity="xi")
    return _decay_length(sizes, decaying, window, "xi")


def cutoff_layer(ls: Sequence[float], values: Sequence[float], window: Optional[Window] = None) -> CorrelationLength:
    """
    Cutoff layer l* from ln(C sqrt(l)) = a - l / l*.

    The result's xi field holds l*.
    """
    ls, values = np.asarray(ls, dtype=float), np.asarray(values, dtype=float)
    mask, window = _window_mask(ls, window)
    l, c = ls[mask], values[mask]
    if l.size < 2 or np.any(c <= 0.0):
        raise FitError(config.ERROR_MESSAGES["nonpositive_fit"].format(window=window), quantity="cutoff")
    return _decay_length(l, c * np.sqrt(l), window, "cutoff")


def kesten_exponent(curves: Sequence[Curve], x_th: float, min_distance: float = 0.0,
                    max_distance: float = math.inf) -> ScalingFit:
    """
    Correlation-length exponent nu from xi ~ |x - x_th|^(-nu).

    At every grid point of the smallest curve with min_distance <=
    |x - x_th| <= max_distance, the curves are interpolated to give one
    value per size, and correlation_length runs in the sub or super regime
    depending on the side of x_th. Points without a monotone decay are
    skipped. The returned exponent is nu (the negated slope).

    Raises:
        FitError: If fewer than two points survive
    """
    ordered = sorted(curves, key=lambda curve: curve.label.size)
    if len(ordered) < config.MIN_CORRELATION_SIZES:
        raise FitError(f"Need {config.MIN_CORRELATION_SIZES}+ curves", quantity="nu")
    low = max(curve.xs[0] for curve in ordered)
    high = min(curve.xs[-1] for curve in ordered)

    distances, lengths = [], []
    for x in ordered[0].xs:
        distance = abs(x - x_th)
        if not (low <= x <= high and min_distance <= distance <= max_distance) or distance == 0.0:
            continue
        values = {curve.label.size: float(curve.at(x)) for curve in ordered}
        try:
            xi = correlation_length(values, "super" if x > x_th else "sub")
        except FitError:
            continue
        distances.append(distance)
        lengths.append(xi.xi)
    logger.debug(f"Kesten fit uses {len(distances)} grid points")
    if len(distances) < 2:
        raise FitError("Fewer than two grid points give a correlation length", quantity="nu")
    fit = fit_power_law(distances, lengths, (min(distances), max(distances)))
    return replace(fit, exponent=-fit.exponent)


# ============================================================================
# Bethe pipelines
# ============================================================================

def bethe_cutoff_exponent(k: int = 3, window: Window = config.DEFAULT_CUTOFF_WINDOW,
                          points: int = 9) -> ScalingFit:
    """
    z nu from the cutoff layer l* of undiluted ConPT below threshold.

    For each distance delta below c_th the layer profile runs to 5/delta and
    l* is fitted over the last four fifths of it. The returned exponent is
    z nu (the negated slope of l* against delta).
    """
    spec = BetheSpec(k, 1.0, RuleSystem.CONPT)
    c_th = bethe_thresholds(spec).threshold
    deltas = np.logspace(math.log10(window[0]), math.log10(window[1]), points)
    cutoffs = []
    for delta in deltas:
        max_layers = int(math.ceil(5.0 / delta))
        profile = bethe_layer_profile(spec, max_layers, c_th - delta)
        layers = np.arange(1, max_layers + 1)
        cutoffs.append(cutoff_layer(layers, profile, (max_layers / 5.0, float(max_layers))).xi)
        logger.debug(f"delta={delta!r}: l*={cutoffs[-1]!r}")
    fit = fit_power_law(deltas, cutoffs)
    return replace(fit, exponent=-fit.exponent)


def bethe_turning_exponent(k: int = 3, layers: Sequence[int] = (100, 215, 464, 1000, 2154, 4642, 10000),
                           points: int = 601) -> ScalingFit:
    """
    1/(z nu) from the approach of finite-l turning points to c_th.

    Each finite curve is sampled on c_th + [-10/l, 40/l]. The returned
    exponent is 1/(z nu) (the negated slope of |c_th(l) - c_th| against l).
    """
    spec = BetheSpec(k, 1.0, RuleSystem.CONPT)
    c_th = bethe_thresholds(spec).threshold
    offsets = []
    for layer in layers:
        grid = c_th + np.linspace(-10.0 / layer, 40.0 / layer, points)
        values = bethe_finite_curve(spec, int(layer), grid)
        label = CurveLabel(size=int(layer), rules=spec.rules.value, lattice=f"bethe-{k}")
        offsets.append(abs(turning_point(Curve(grid, values, label)) - c_th))
    fit = fit_power_law(np.asarray(layers, dtype=float), offsets)
    return replace(fit, exponent=-fit.exponent)


def bethe_power_laws(k: int = 3, threshold_window: Window = config.DEFAULT_THRESHOLD_WINDOW,
                     saturation_window: Window = config.DEFAULT_SATURATION_WINDOW,
                     points: int = 13) -> Dict[str, ScalingFit]:
    """
    Slopes of C_SC against c - c_th and of 1 - C_SC against c_sat - c.

    Returns a mapping with keys "threshold" and "saturation".
    """
    spec = BetheSpec(k, 1.0, RuleSystem.CONPT)
    thresholds = bethe_thresholds(spec)
    above = np.logspace(math.log10(threshold_window[0]), math.log10(threshold_window[1]), points)
    below = np.logspace(math.log10(saturation_window[0]), math.log10(saturation_window[1]), points)
    near_threshold = [bethe_exact(spec, thresholds.threshold + delta) for delta in above]
    near_saturation = [bethe_saturation_deficit(k, thresholds.saturation - delta) for delta in below]
    return {
        "threshold": fit_power_law(above, near_threshold, threshold_window),
        "saturation": fit_power_law(below, near_saturation, saturation_window),
    }


# ============================================================================
# Threshold table
# ============================================================================

def theta_units(value: float, rules: Union[str, RuleSystem]) -> float:
    """Convert a p or c threshold to (4/pi) theta."""
    return float(4.0 / math.pi * RuleSystem.parse(rules).measure_to_theta(value))


def _interior_root(equation, quantity: str) -> float:
    """First root of equation on (0, 1) from a grid scan and bisection."""
    grid = np.arange(1, config.ROOT_SCAN_POINTS) / config.ROOT_SCAN_POINTS
    values = [equation(x) for x in grid]
    for i, value in enumerate(values):
        if value == 0.0:
            return float(grid[i])
        if i + 1 < len(values) and value * values[i + 1] < 0.0:
            return float(optimize.bisect(equation, grid[i], grid[i + 1], xtol=config.ROOT_TOLERANCE))
    raise FitError(f"No root bracketed in (0, 1) for {quantity}", quantity=quantity)


def swap_probability(k: int) -> float:
    """P_swap(k) = 2x - x^2 at the interior root of the swapping equation."""
    def equation(x: float) -> float:
        return 2.0 * x + x ** k * (x * k - x - k - 1.0) - (1.0 - x) / (k - 1.0)
    x = _interior_root(equation, "qep")
    return 2.0 * x - x * x


def ghz_probability(k: int) -> float:
    """P_GHZ(k), the interior root of the GHZ-measurement equation."""
    terms = range(int(math.floor(k / 2.0 - 1.0)) + 1)

    def equation(x: float) -> float:
        swap = 2.0 * x - x * x
        series = sum(math.comb(2 * i, i) * 4.0 ** -i * swap ** i for i in terms)
        return 1.0 - (1.0 - x) * series - 1.0 / (k - 1.0)
    return _interior_root(equation, "qep_ghz")


def literature_thresholds(k: int) -> ThresholdRow:
    """
    Bethe-lattice thresholds of the four theories in theta-units.

    Examples:
        >>> row = literature_thresholds(3)
        >>> round(row.cep, 12), round(row.conpt, 12)
        (0.666666666667, 0.5)
    """
    low, high = config.VALIDATION_RULES["k"]
    if not low <= k <= high:
        raise ValidationError(f"Degree k must lie in [{int(low)}, {int(high)}]", field_name="k", field_value=k)
    return ThresholdRow(
        label=f"bethe-{k}",
        cep=4.0 / math.pi * math.asin(1.0 / math.sqrt(2.0 * (k - 1))),
        qep=theta_units(swap_probability(k), RuleSystem.CLASSICAL),
        qep_ghz=theta_units(ghz_probability(k), RuleSystem.CLASSICAL),
        conpt=2.0 / math.pi * math.asin(1.0 / math.sqrt(k - 1)),
    )


TABLE1_2D_ROWS: Dict[str, ThresholdRow] = {
    name: ThresholdRow(name, *row) for name, row in config.TABLE1_2D.items()
}
