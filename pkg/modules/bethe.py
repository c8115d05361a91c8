#!/usr/bin/env python3
"""
Exact Bethe-lattice results for both rule systems.

A node's connectivity to the boundary through its k - 1 forward branches,
P', satisfies

    P' = parallel(series(P', w) x (k - 1))

and the root combines all k branches. Every recursion here runs in the
complement of the parallel factor, D = 1 - G, where parallel composition of m
copies of a link reads

    D_m = 1 - (1 - D)^m = -expm1(m * log1p(-D))

so values of order 1e-8 near threshold keep full relative precision. For
ConPT the complement of one link is D = y^2 / (2 (1 + sqrt(1 - y^2))).

Dilution keeps each link with probability f. The average over the kept
branches is taken in parallel-factor space, giving the factor
(1 - f D)^(k - 1); for classical rules this is the exact diluted recursion,
for ConPT it is the form whose linearization gives c_th = 1/sqrt(f (k - 1)).
The literal average of the composed concurrences is available as
averaging="value".

Finite lattices use H(0) = 1 at the leaves, H(m) = branch update of H(m - 1)
and the root update with k branches on H(l - 1), so l = 1 gives
parallel(w x k), the same tree as network.build_bethe(k, l).
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import optimize, stats

from modules import config
from modules.exceptions import BetheConvergenceError, ValidationError
from modules.performance import timed
from modules.weights import RuleSystem, parallel_repeat, snap_measure

logger = logging.getLogger(__name__)

AVERAGING_MODES = ("factor", "value")


@dataclass(frozen=True)
class BetheSpec:
    """Degree, retained fraction and rule system of a Bethe lattice."""
    k: int
    f: float = 1.0
    rules: RuleSystem = RuleSystem.CONPT

    def __post_init__(self):
        low, high = config.VALIDATION_RULES["k"]
        if not low <= int(self.k) <= high:
            raise ValidationError(f"Degree k must lie in [{int(low)}, {int(high)}]", field_name="k",
                                  field_value=self.k)
        if not 0.0 < float(self.f) <= 1.0:
            raise ValidationError(config.ERROR_MESSAGES["bad_fraction"].format(value=self.f),
                                  field_name="f", field_value=self.f)
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "f", float(self.f))
        object.__setattr__(self, "rules", RuleSystem.parse(self.rules))

    @property
    def branching(self) -> float:
        """Mean number of kept forward branches, f (k - 1)."""
        return self.f * (self.k - 1)


@dataclass(frozen=True)
class BetheThresholds:
    """
    Threshold and (undiluted ConPT only) saturation point.

    valid is False when f < 1/(k - 1); the threshold is then above 1 and has
    no physical meaning.
    """
    threshold: float
    saturation: Optional[float]
    valid: bool


@dataclass(frozen=True)
class DilutedValue:
    value: float
    label: str


# ============================================================================
# Complement-space kernels
# ============================================================================

def _deficit(rules: RuleSystem, y: np.ndarray) -> np.ndarray:
    """1 - parallel_factor(y)."""
    if rules is RuleSystem.CLASSICAL:
        return y
    return np.square(y) / (2.0 * (1.0 + np.sqrt(np.maximum(1.0 - np.square(y), 0.0))))


def _from_deficit(rules: RuleSystem, deficit: np.ndarray) -> np.ndarray:
    """Measure whose parallel factor is 1 - deficit."""
    deficit = np.clip(deficit, 0.0, 1.0)
    if rules is RuleSystem.CLASSICAL:
        result = deficit
    else:
        factor = 1.0 - deficit
        result = np.where(factor <= 0.5, 1.0, 2.0 * np.sqrt(np.maximum(factor * deficit, 0.0)))
    result = np.where(result < config.SNAP_EPSILON, 0.0, result)
    return np.where(result > 1.0 - config.SNAP_EPSILON, 1.0, result)


def _combine(spec: BetheSpec, values: np.ndarray, w: np.ndarray, branches: int,
             averaging: str = "factor") -> np.ndarray:
    """Parallel composition of `branches` diluted copies of series(values, w)."""
    y = values * w
    if averaging == "value" and spec.f < 1.0 and spec.rules is RuleSystem.CONPT:
        m = np.arange(branches + 1)
        weights = stats.binom.pmf(m, branches, spec.f)
        return sum(weight * parallel_repeat(spec.rules, y, int(count)) for count, weight in zip(m, weights))
    with np.errstate(divide="ignore"):
        log_factor = np.log1p(-spec.f * _deficit(spec.rules, y))
    return _from_deficit(spec.rules, -np.expm1(branches * log_factor))


def _scalar_combine(classical: bool, f: float, branches: int, value: float, w: float) -> float:
    """Scalar _combine with math calls, used in long layer loops."""
    y = value * w
    if classical:
        deficit = y
    else:
        deficit = y * y / (2.0 * (1.0 + math.sqrt(max(1.0 - y * y, 0.0))))
    fd = f * deficit
    total = 1.0 if fd >= 1.0 else -math.expm1(branches * math.log1p(-fd))
    if classical:
        return total
    factor = 1.0 - total
    return 1.0 if factor <= 0.5 else 2.0 * math.sqrt(factor * total)


def _expected_sqrt(n: int, f: float) -> float:
    m = np.arange(n + 1)
    return float(np.sum(stats.binom.pmf(m, n, f) * np.sqrt(m)))


def linear_threshold(spec: BetheSpec, averaging: str = "factor") -> float:
    """Measure at which the trivial fixed point becomes unstable."""
    if spec.rules is RuleSystem.CLASSICAL:
        return 1.0 / spec.branching
    if averaging == "value" and spec.f < 1.0:
        return 1.0 / _expected_sqrt(spec.k - 1, spec.f)
    return 1.0 / math.sqrt(spec.branching)


# ============================================================================
# Thresholds and closed forms
# ============================================================================

def saturation_point(k: int) -> float:
    """
    Undiluted ConPT saturation point c_sat(k).

    Examples:
        >>> round(saturation_point(3), 5)
        0.8381
    """
    half, quarter = 0.5, 0.25
    numerator = half ** (1.0 / k) - quarter ** (1.0 / k)
    denominator = half ** ((k - 1.0) / k) - quarter ** ((k - 1.0) / k)
    return math.sqrt(numerator) / math.sqrt(denominator)


def bethe_thresholds(spec: BetheSpec) -> BetheThresholds:
    """
    Threshold, saturation point and validity of a Bethe spec.

    Examples:
        >>> bethe_thresholds(BetheSpec(3, 1.0, RuleSystem.CLASSICAL)).threshold
        0.5
    """
    valid = spec.branching >= 1.0
    if spec.rules is RuleSystem.CLASSICAL:
        return BetheThresholds(threshold=1.0 / spec.branching, saturation=None, valid=valid)
    saturation = saturation_point(spec.k) if spec.f == 1.0 else None
    return BetheThresholds(threshold=1.0 / math.sqrt(spec.branching), saturation=saturation, valid=valid)


def bethe_closed_form_k3(c: float) -> float:
    """
    Closed-form ConPT sponge-crossing concurrence for k = 3.

    0 up to c_th = 1/sqrt(2), sin(2 acos(u^(3/2))) with
    u = sqrt(1/4 + c^-2) - 1/2 up to c_sat, and 1 beyond.
    """
    c = snap_measure(float(c), "c")
    if c <= 1.0 / math.sqrt(2.0):
        return 0.0
    u = math.sqrt(0.25 + 1.0 / (c * c)) - 0.5
    inner = u ** 1.5
    if inner <= 1.0 / math.sqrt(2.0):
        return 1.0
    return math.sin(2.0 * math.acos(inner))


def _conpt_root_u(k: int, c: float) -> float:
    """Root u in (0, 1) of c^2 u^(k-2) (1 + u + ... + u^(k-2)) = 1."""
    if k == 3:
        return math.sqrt(0.25 + 1.0 / (c * c)) - 0.5
    c2 = c * c

    def equation(u: float) -> float:
        return c2 * u ** (k - 2) * sum(u ** i for i in range(k - 1)) - 1.0
    return optimize.brentq(equation, 0.0, 1.0, xtol=1e-16, rtol=4 * np.finfo(float).eps)


def bethe_exact(spec: BetheSpec, w: float) -> float:
    """
    Exact undiluted infinite-lattice value for any k.

    Classical: the nontrivial root of P' = 1 - (1 - p P')^(k-1), then
    1 - (1 - p P')^k. ConPT: u from the scalar equation in _conpt_root_u,
    C = 2 sqrt(u^k (1 - u^k)) or 1 once u^k <= 1/2.
    """
    if spec.f != 1.0:
        raise ValidationError("Exact solutions exist for undiluted lattices only", field_name="f",
                              field_value=spec.f)
    w = snap_measure(float(w), spec.rules.measure_name)
    k = spec.k
    if spec.rules is RuleSystem.CLASSICAL:
        if w <= 1.0 / (k - 1):
            return 0.0
        if w >= 1.0:
            return 1.0

        def ratio(branch: float) -> float:
            return -math.expm1((k - 1) * math.log1p(-w * branch)) / branch - 1.0
        low = 1e-12
        if ratio(low) <= 0.0:
            return 0.0
        branch = optimize.brentq(ratio, low, 1.0, xtol=1e-16, rtol=4 * np.finfo(float).eps)
        return float(-math.expm1(k * math.log1p(-w * branch)))

    if w <= 1.0 / math.sqrt(k - 1):
        return 0.0
    share = _conpt_root_u(k, w) ** k
    if share <= 0.5:
        return 1.0
    return 2.0 * math.sqrt(share * (1.0 - share))


def bethe_saturation_deficit(k: int, c: float) -> float:
    """1 - C_SC for undiluted ConPT, free of cancellation near c_sat."""
    c = snap_measure(float(c), "c")
    if c <= 1.0 / math.sqrt(k - 1):
        return 1.0
    share = _conpt_root_u(k, c) ** k
    if share <= 0.5:
        return 0.0
    delta = 2.0 * share - 1.0
    return delta * delta / (1.0 + math.sqrt(1.0 - delta * delta))


# ============================================================================
# Fixed points
# ============================================================================

def _polish(mapping: Callable[[float], float], value: float) -> float:
    """Bracket the nontrivial root of mapping(P) - P around value and solve it."""
    def gap(branch: float) -> float:
        return mapping(branch) - branch

    if gap(1.0) >= 0.0:
        return 1.0
    if gap(value) > 0.0:
        return optimize.brentq(gap, value, 1.0, xtol=1e-16, rtol=4 * np.finfo(float).eps)
    low = value
    while gap(low) <= 0.0:
        low *= 0.5
        if low < config.BETHE_ZERO_FLOOR:
            return 0.0
    return optimize.brentq(gap, low, value, xtol=1e-16, rtol=4 * np.finfo(float).eps)


def _branch_fixed_point(spec: BetheSpec, w: float, averaging: str) -> float:
    """Stable fixed point P' of the branch recursion, starting from w."""
    if w <= linear_threshold(spec, averaging):
        return 0.0
    w_array = np.array(w)

    def mapping(branch: float) -> float:
        return float(_combine(spec, np.array(branch), w_array, spec.k - 1, averaging))

    damping = config.BETHE_DAMPING
    branch = w
    for iteration in range(config.BETHE_MAX_ITERATIONS):
        updated = (1.0 - damping) * branch + damping * mapping(branch)
        if updated < config.BETHE_ZERO_FLOOR:
            return 0.0
        if abs(updated - branch) <= config.BETHE_CONVERGENCE:
            return updated
        branch = updated
        if iteration >= config.BETHE_POLISH_AFTER:
            logger.debug(f"Polishing slow Bethe iteration at w={w!r} (k={spec.k}, f={spec.f})")
            return _polish(mapping, branch)
    raise BetheConvergenceError(config.ERROR_MESSAGES["bethe_failed"].format(
        iterations=config.BETHE_MAX_ITERATIONS), last_value=branch, iterations=config.BETHE_MAX_ITERATIONS)


def _check_averaging(averaging: str) -> None:
    if averaging not in AVERAGING_MODES:
        raise ValidationError(f"Unknown averaging mode: {averaging}", field_name="averaging",
                              field_value=averaging)


def bethe_fixed_point(spec: BetheSpec, w: float, averaging: str = "factor") -> float:
    """
    Infinite-lattice sponge-crossing value by damped fixed-point iteration.

    Examples:
        >>> round(bethe_fixed_point(BetheSpec(3, rules=RuleSystem.CLASSICAL), 0.75), 12)
        0.962962962963
    """
    _check_averaging(averaging)
    w = snap_measure(float(w), spec.rules.measure_name)
    branch = _branch_fixed_point(spec, w, averaging)
    if branch <= 0.0:
        return 0.0
    return float(_combine(spec, np.array(branch), np.array(w), spec.k, averaging))


def bethe_diluted_recursion(spec: BetheSpec, w: float, averaging: str = "factor") -> DilutedValue:
    """
    Fixed point of the diluted recursion.

    The value is labeled "exact" for classical rules and for undiluted
    lattices; diluted ConPT values are labeled "near-threshold proxy".
    """
    value = bethe_fixed_point(spec, w, averaging)
    exact = spec.rules is RuleSystem.CLASSICAL or spec.f == 1.0
    return DilutedValue(value=value, label="exact" if exact else "near-threshold proxy")


# ============================================================================
# Finite lattices
# ============================================================================

def bethe_finite_curve(spec: BetheSpec, layers: int, ws: Union[Sequence[float], np.ndarray],
                       averaging: str = "factor") -> np.ndarray:
    """Finite-lattice values for a whole grid of link measures."""
    _check_averaging(averaging)
    if layers < 1:
        raise ValidationError("Bethe lattice needs at least one layer", field_name="layers", field_value=layers)
    ws = np.clip(np.asarray(ws, dtype=float), 0.0, 1.0)
    toward_leaves = np.ones_like(ws)
    for _ in range(layers - 1):
        toward_leaves = _combine(spec, toward_leaves, ws, spec.k - 1, averaging)
    return _combine(spec, toward_leaves, ws, spec.k, averaging)


def bethe_finite(spec: BetheSpec, layers: int, w: float, averaging: str = "factor") -> float:
    """
    Sponge-crossing value of an l-layer Bethe lattice.

    Examples:
        >>> bethe_finite(BetheSpec(3, rules=RuleSystem.CLASSICAL), 1, 0.5)  # parallel of 3 links
        0.875
    """
    w = snap_measure(float(w), spec.rules.measure_name)
    return float(bethe_finite_curve(spec, layers, np.array([w]), averaging)[0])


@timed("bethe.layer_profile")
def bethe_layer_profile(spec: BetheSpec, max_layers: int, w: float) -> np.ndarray:
    """Values for l = 1..max_layers in one pass (index l - 1)."""
    if max_layers < 1:
        raise ValidationError("Bethe lattice needs at least one layer", field_name="layers",
                              field_value=max_layers)
    w = snap_measure(float(w), spec.rules.measure_name)
    classical = spec.rules is RuleSystem.CLASSICAL
    profile = np.empty(max_layers)
    toward_leaves = 1.0
    for layer in range(max_layers):
        profile[layer] = _scalar_combine(classical, spec.f, spec.k, toward_leaves, w)
        toward_leaves = _scalar_combine(classical, spec.f, spec.k - 1, toward_leaves, w)
    return profile


def bethe_curve(spec: BetheSpec, ws: Sequence[float], layers: Optional[int] = None) -> np.ndarray:
    """Infinite (layers None) or finite curve over a grid."""
    if layers is not None:
        return bethe_finite_curve(spec, layers, ws)
    return np.array([bethe_fixed_point(spec, w) for w in ws])
