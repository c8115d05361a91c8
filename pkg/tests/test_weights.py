#!/usr/bin/env python3
"""
Test cases for link weights and the series/parallel composition laws.

Covers:
- theta <-> p / c conversions and their inverses
- Series and parallel composition for both rule systems
- The ConPT saturation branch
- Rule-level inequalities over random composition trees
"""

import math
import sys
import unittest
from pathlib import Path

import numpy as np
import pytest

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from modules.exceptions import ValidationError
from modules.weights import (
    LinkWeight, RuleSystem, compose_parallel, compose_series, convert_weight, evaluate_tree,
    parallel_repeat, random_composition_tree, weight_from_c, weight_from_p
)

CLASSICAL = RuleSystem.CLASSICAL
CONPT = RuleSystem.CONPT


class TestLinkWeight(unittest.TestCase):
    """Conversions between theta, p and c."""

    def test_endpoints(self):
        self.assertEqual(convert_weight(LinkWeight(math.pi / 4)), (1.0, 1.0))
        self.assertEqual(convert_weight(LinkWeight(0.0)), (0.0, 0.0))

    def test_pi_over_eight(self):
        p, c = convert_weight(LinkWeight(math.pi / 8))
        self.assertAlmostEqual(p, 1.0 - math.cos(math.pi / 4), places=12)
        self.assertAlmostEqual(c, math.sqrt(0.5), places=12)

    def test_inverse_constructors(self):
        for theta in np.linspace(0.01, math.pi / 4 - 0.01, 25):
            w = LinkWeight(float(theta))
            self.assertAlmostEqual(weight_from_p(w.p).theta, w.theta, delta=1e-12)
            self.assertAlmostEqual(weight_from_c(w.c).theta, w.theta, delta=1e-12)

    def test_out_of_range_rejected(self):
        with self.assertRaises(ValidationError):
            LinkWeight(1.0)
        with self.assertRaises(ValidationError):
            LinkWeight(-0.1)
        with self.assertRaises(ValidationError):
            LinkWeight(float("nan"))
        with self.assertRaises(ValidationError):
            weight_from_p(1.2)
        with self.assertRaises(ValidationError):
            weight_from_c(-0.5)

    def test_near_endpoint_values_snap(self):
        self.assertEqual(LinkWeight(math.pi / 4 + 1e-14).theta, math.pi / 4)
        self.assertEqual(weight_from_c(1.0 - 1e-14).c, 1.0)

    def test_rule_measure_views(self):
        w = LinkWeight(0.3)
        self.assertEqual(CLASSICAL.measure(w), w.p)
        self.assertEqual(CONPT.measure(w), w.c)
        self.assertAlmostEqual(CONPT.weight_of(w.c).theta, 0.3, places=12)

    def test_parse_rules(self):
        self.assertIs(RuleSystem.parse("ConPT"), CONPT)
        self.assertIs(RuleSystem.parse(" classical "), CLASSICAL)
        with self.assertRaises(ValidationError):
            RuleSystem.parse("quantum")


class TestComposition(unittest.TestCase):
    """Series and parallel laws."""

    def test_series_is_product(self):
        self.assertEqual(compose_series(CLASSICAL, [0.5, 0.5]), 0.25)
        self.assertAlmostEqual(compose_series(CONPT, [0.70711, 0.70711]), 0.5, delta=1e-4)

    def test_singleton_is_identity(self):
        for rules in (CLASSICAL, CONPT):
            self.assertEqual(compose_series(rules, [0.37]), 0.37)
            self.assertAlmostEqual(compose_parallel(rules, [0.37]), 0.37, places=12)

    def test_empty_rejected(self):
        with self.assertRaises(ValidationError):
            compose_series(CLASSICAL, [])
        with self.assertRaises(ValidationError):
            compose_parallel(CONPT, [])

    def test_out_of_range_value_rejected(self):
        with self.assertRaises(ValidationError):
            compose_parallel(CLASSICAL, [0.5, 1.5])

    def test_classical_parallel(self):
        self.assertAlmostEqual(compose_parallel(CLASSICAL, [0.5, 0.5]), 0.75, places=12)

    def test_conpt_parallel(self):
        self.assertAlmostEqual(compose_parallel(CONPT, [0.6, 0.6]), 0.78460, delta=1e-4)
        self.assertAlmostEqual(compose_parallel(CONPT, [0.8, 0.64]), 0.90996, delta=1e-4)

    def test_conpt_saturation_is_exactly_one(self):
        self.assertEqual(compose_parallel(CONPT, [0.95, 0.95]), 1.0)
        self.assertEqual(compose_parallel(CONPT, [0.2, 1.0]), 1.0)

    def test_parallel_pair_matches_checked_law(self):
        for a, b in [(0.1, 0.2), (0.6, 0.6), (0.95, 0.95), (0.0, 0.4)]:
            for rules in (CLASSICAL, CONPT):
                self.assertAlmostEqual(rules.parallel_pair(a, b), compose_parallel(rules, [a, b]), places=12)

    def test_parallel_repeat(self):
        values = np.array([0.0, 0.3, 0.6, 0.95])
        repeated = parallel_repeat(CONPT, values, 3)
        for value, result in zip(values, repeated):
            self.assertAlmostEqual(result, compose_parallel(CONPT, [value] * 3), places=12)
        np.testing.assert_array_equal(parallel_repeat(CLASSICAL, values, 0), np.zeros(4))
        with self.assertRaises(ValidationError):
            parallel_repeat(CLASSICAL, values, -1)


def test_laws_are_monotone_and_bounded():
    """Both laws are non-decreasing in every argument and keep their bounds."""
    rng = np.random.default_rng(7)
    for rules in (CLASSICAL, CONPT):
        for _ in range(500):
            values = list(rng.uniform(0.0, 1.0, size=int(rng.integers(2, 5))))
            bumped = list(values)
            index = int(rng.integers(len(values)))
            bumped[index] = min(1.0, bumped[index] + float(rng.uniform(0.0, 0.2)))
            series, parallel = compose_series(rules, values), compose_parallel(rules, values)
            assert compose_series(rules, bumped) >= series - 1e-12
            assert compose_parallel(rules, bumped) >= parallel - 1e-12
            assert 0.0 <= series <= min(values) + 1e-12
            assert max(values) - 1e-12 <= parallel <= 1.0


def test_quantum_advantage_over_random_trees():
    """ConPT never loses against classical rules on the same composition tree."""
    rng = np.random.default_rng(20210)
    slack = 1e-12
    for _ in range(10_000):
        tree = random_composition_tree(rng, depth=6, max_arity=4)
        p = evaluate_tree(CLASSICAL, tree)
        c = evaluate_tree(CONPT, tree)
        assert p <= c + slack
        # optimal singlet probability of the pure state the concurrence result stands for
        optimum = weight_from_c(c).p
        assert optimum >= p - 1e-9
        assert optimum <= c + slack
        assert c == pytest.approx(math.sqrt(1.0 - (1.0 - optimum) ** 2), abs=1e-9)


def test_squeeze_does_not_bound_the_classical_result():
    """Two p = 0.5 links in series: c rises above sqrt(1 - (1 - p)^2)."""
    half = weight_from_p(0.5)
    p = compose_series(CLASSICAL, [half.p, half.p])
    c = compose_series(CONPT, [half.c, half.c])
    assert p == pytest.approx(0.25, abs=1e-12)
    assert c == pytest.approx(0.75, abs=1e-12)
    assert c > math.sqrt(1.0 - (1.0 - p) ** 2) + 0.05
    # the optimum for the same state stays inside the squeeze
    optimum = weight_from_c(c).p
    assert p < optimum <= c
    assert c == pytest.approx(math.sqrt(1.0 - (1.0 - optimum) ** 2), abs=1e-12)


def test_tree_leaf_and_unknown_kind():
    assert evaluate_tree(CONPT, math.pi / 4) == 1.0
    assert evaluate_tree(CLASSICAL, ("S", [math.pi / 4, 0.0])) == 0.0
    with pytest.raises(ValidationError):
        evaluate_tree(CLASSICAL, ("X", [0.1, 0.2]))
