#!/usr/bin/env python3
"""
Link weights and the series/parallel composition laws.

A link is described by its entanglement angle theta in [0, pi/4]. Two
derived measures exist:

    p = 2 sin^2(theta)   singlet conversion probability (classical rules)
    c = sin(2 theta)     concurrence (ConPT rules)

Series composition is the product of the measures for both rule systems.
Parallel composition is a product in a rule-specific "parallel factor"
space:

    Classical: 1 - p = prod(1 - p_i)
    ConPT:     (1 + sqrt(1 - c^2)) / 2 = max{1/2, prod (1 + sqrt(1 - c_i^2)) / 2}

When the ConPT product falls to 1/2 or below the result saturates to c = 1
exactly. Values within SNAP_EPSILON of 0 or 1 are snapped to the endpoint
before and after composition.

All functions are pure and thread-safe.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from modules import config
from modules.exceptions import ValidationError

ArrayLike = Union[float, np.ndarray]


def snap_measure(value: float, measure: str = "measure") -> float:
    """
    Validate a measure value and snap it to an endpoint when close.

    Raises:
        ValidationError: If value lies outside [0, 1] beyond SNAP_EPSILON
    """
    if not (-config.SNAP_EPSILON <= value <= 1.0 + config.SNAP_EPSILON):
        raise ValidationError(
            config.ERROR_MESSAGES["measure_range"].format(measure=measure, value=value),
            field_name=measure, field_value=value)
    if value < config.SNAP_EPSILON:
        return 0.0
    if value > 1.0 - config.SNAP_EPSILON:
        return 1.0
    return float(value)


@dataclass(frozen=True, order=True)
class LinkWeight:
    """
    Entanglement angle of a single link.

    theta is the canonical representation; p and c are derived views.

    Example:
        >>> w = LinkWeight(math.pi / 8)
        >>> round(w.p, 5), round(w.c, 5)
        (0.29289, 0.70711)
    """
    theta: float

    def __post_init__(self):
        theta = float(self.theta)
        if math.isnan(theta) or not (-config.SNAP_EPSILON <= theta <= config.THETA_MAX + config.SNAP_EPSILON):
            raise ValidationError(config.ERROR_MESSAGES["theta_range"].format(value=self.theta),
                                  field_name="theta", field_value=self.theta)
        object.__setattr__(self, "theta", min(max(theta, 0.0), config.THETA_MAX))

    @property
    def p(self) -> float:
        return snap_measure(2.0 * math.sin(self.theta) ** 2, "p")

    @property
    def c(self) -> float:
        return snap_measure(math.sin(2.0 * self.theta), "c")

    @classmethod
    def from_p(cls, p: float) -> "LinkWeight":
        p = snap_measure(p, "p")
        return cls(math.asin(math.sqrt(p / 2.0)))

    @classmethod
    def from_c(cls, c: float) -> "LinkWeight":
        c = snap_measure(c, "c")
        return cls(math.asin(c) / 2.0)

    @classmethod
    def maximal(cls) -> "LinkWeight":
        """The pi/4 weight (a singlet)."""
        return cls(config.THETA_MAX)


def convert_weight(w: LinkWeight) -> Tuple[float, float]:
    """Return (p, c) for a link weight."""
    return w.p, w.c


def weight_from_p(p: float) -> LinkWeight:
    """Inverse of the p view."""
    return LinkWeight.from_p(p)


def weight_from_c(c: float) -> LinkWeight:
    """Inverse of the c view."""
    return LinkWeight.from_c(c)


def _conpt_factor(c: ArrayLike) -> ArrayLike:
    return (1.0 + np.sqrt(np.maximum(1.0 - np.square(c), 0.0))) / 2.0


class RuleSystem(str, Enum):
    """The two interchangeable rule systems."""

    CLASSICAL = "classical"
    CONPT = "conpt"

    @classmethod
    def parse(cls, name: Union[str, "RuleSystem"]) -> "RuleSystem":
        if isinstance(name, RuleSystem):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError as e:
            raise ValidationError(config.ERROR_MESSAGES["unknown_rules"].format(name=name),
                                  field_name="rules", field_value=name) from e

    @property
    def measure_name(self) -> str:
        return "p" if self is RuleSystem.CLASSICAL else "c"

    # Measure <-> angle

    def measure(self, w: LinkWeight) -> float:
        return w.p if self is RuleSystem.CLASSICAL else w.c

    def weight_of(self, value: float) -> LinkWeight:
        if self is RuleSystem.CLASSICAL:
            return LinkWeight.from_p(value)
        return LinkWeight.from_c(value)

    def theta_to_measure(self, theta: ArrayLike) -> ArrayLike:
        """Unchecked vectorized theta -> measure."""
        if self is RuleSystem.CLASSICAL:
            return 2.0 * np.square(np.sin(theta))
        return np.sin(2.0 * np.asarray(theta, dtype=float))

    def measure_to_theta(self, value: ArrayLike) -> ArrayLike:
        """Unchecked vectorized measure -> theta (inputs clipped to [0, 1])."""
        value = np.clip(value, 0.0, 1.0)
        if self is RuleSystem.CLASSICAL:
            return np.arcsin(np.sqrt(value / 2.0))
        return np.arcsin(value) / 2.0

    # Parallel factor space

    def parallel_factor(self, value: ArrayLike) -> ArrayLike:
        """Map a measure into the space where parallel composition multiplies."""
        if self is RuleSystem.CLASSICAL:
            return 1.0 - np.asarray(value, dtype=float)
        return _conpt_factor(np.asarray(value, dtype=float))

    def from_parallel_factor(self, factor: ArrayLike) -> ArrayLike:
        """Inverse of parallel_factor, with the ConPT saturation branch."""
        factor = np.asarray(factor, dtype=float)
        if self is RuleSystem.CLASSICAL:
            result = 1.0 - factor
        else:
            saturated = factor <= 0.5
            safe = np.where(saturated, 0.75, factor)
            result = np.where(saturated, 1.0, 2.0 * np.sqrt(np.maximum(safe * (1.0 - safe), 0.0)))
        return _snap_array(result)

    # Unchecked scalar kernels for hot loops

    def parallel_pair(self, a: float, b: float) -> float:
        """Parallel composition of two snapped measures, no validation."""
        if self is RuleSystem.CLASSICAL:
            value = 1.0 - (1.0 - a) * (1.0 - b)
        else:
            if a >= 1.0 or b >= 1.0:
                return 1.0
            factor = ((1.0 + math.sqrt(1.0 - a * a)) * (1.0 + math.sqrt(1.0 - b * b))) / 4.0
            if factor <= 0.5:
                return 1.0
            value = 2.0 * math.sqrt(factor * (1.0 - factor))
        return 1.0 if value > 1.0 - config.SNAP_EPSILON else value

    # Checked compositions

    def series(self, values: Sequence[float]) -> float:
        return compose_series(self, values)

    def parallel(self, values: Sequence[float]) -> float:
        return compose_parallel(self, values)


def _snap_array(values: ArrayLike) -> ArrayLike:
    values = np.clip(values, 0.0, 1.0)
    values = np.where(values < config.SNAP_EPSILON, 0.0, values)
    values = np.where(values > 1.0 - config.SNAP_EPSILON, 1.0, values)
    return float(values) if np.ndim(values) == 0 else values


def _checked(values: Iterable[float], rules: RuleSystem) -> List[float]:
    values = [snap_measure(float(v), rules.measure_name) for v in values]
    if not values:
        raise ValidationError(config.ERROR_MESSAGES["empty_composition"], field_name="ws")
    return values


def compose_series(rules: RuleSystem, ws: Sequence[float]) -> float:
    """
    Series composition: the product of the measures.

    Examples:
        >>> compose_series(RuleSystem.CLASSICAL, [0.5, 0.5])
        0.25
    """
    rules = RuleSystem.parse(rules)
    values = _checked(ws, rules)
    return snap_measure(math.prod(values), rules.measure_name)


def compose_parallel(rules: RuleSystem, ws: Sequence[float]) -> float:
    """
    Parallel composition in the rule system's measure.

    Examples:
        >>> compose_parallel(RuleSystem.CLASSICAL, [0.5, 0.5])
        0.75
        >>> compose_parallel(RuleSystem.CONPT, [0.95, 0.95])
        1.0
    """
    rules = RuleSystem.parse(rules)
    values = _checked(ws, rules)
    if rules is RuleSystem.CONPT and any(v >= 1.0 for v in values):
        return 1.0
    factor = math.prod(float(rules.parallel_factor(v)) for v in values)
    return float(rules.from_parallel_factor(factor))


def parallel_repeat(rules: RuleSystem, values: ArrayLike, m: int) -> ArrayLike:
    """
    Parallel composition of m identical copies, vectorized over values.

    m = 0 means no link at all and gives 0.
    """
    if m < 0:
        raise ValidationError("Repeat count must be non-negative", field_name="m", field_value=m)
    values = np.asarray(values, dtype=float)
    factor = np.power(rules.parallel_factor(values), m)
    return rules.from_parallel_factor(factor)


# ============================================================================
# Composition trees
# ============================================================================
#
# A tree is either a leaf angle (float) or a pair (kind, children) where kind
# is "S" (series) or "P" (parallel).

CompositionTree = Union[float, Tuple[str, list]]


def random_composition_tree(rng: np.random.Generator, depth: int = 6,
                            max_arity: int = 4) -> CompositionTree:
    """
    Draw a random series/parallel composition tree with random leaf angles.

    Each internal node has 2..max_arity children; the depth never exceeds
    depth.
    """
    if depth <= 0 or rng.random() < 0.25:
        return float(rng.uniform(0.0, config.THETA_MAX))
    kind = "S" if rng.random() < 0.5 else "P"
    arity = int(rng.integers(2, max_arity + 1))
    return kind, [random_composition_tree(rng, depth - 1, max_arity) for _ in range(arity)]


def evaluate_tree(rules: RuleSystem, tree: CompositionTree) -> float:
    """Evaluate a composition tree under a rule system."""
    if not isinstance(tree, tuple):
        return float(_snap_array(rules.theta_to_measure(float(tree))))
    kind, children = tree
    values = [evaluate_tree(rules, child) for child in children]
    if kind == "S":
        return compose_series(rules, values)
    if kind == "P":
        return compose_parallel(rules, values)
    raise ValidationError(f"Unknown tree node kind: {kind}", field_name="kind", field_value=kind)
