#!/usr/bin/env python3
"""
Test cases for the reduction engine.

Covers:
- Degrading single nodes (dangling, series, star-mesh)
- Two-terminal reductions in a fixed order
- Sponge-crossing estimates over randomized orders
- Agreement with the exact classical oracle
"""

import math
import sys
import unittest
from pathlib import Path
from unittest.mock import Mock

import numpy as np
import pytest

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from modules.exceptions import ReductionError, ValidationError
from modules.network import (
    LatticeKind, LatticeSpec, Network, build_bethe, build_lattice, random_connected_network
)
from modules.network_io import read_network_file
from modules.oracle import brute_force_sc
from modules.reduction import ReductionEngine, degrade_node, reduce_to_pair, sponge_crossing
from modules.weights import LinkWeight, RuleSystem, compose_parallel
from tests import TEST_DATA_DIR

CLASSICAL = RuleSystem.CLASSICAL
CONPT = RuleSystem.CONPT
HALF = LinkWeight.from_p(0.5)


def wheatstone(weight=HALF):
    """Bridge between terminals 0 and 3 with the bridge link 1-2."""
    return Network.create(range(4), [(0, 1, weight), (0, 2, weight), (1, 2, weight), (1, 3, weight),
                                     (2, 3, weight)], [0], [3])


def two_paths(weight=HALF):
    return Network.create(range(4), [(0, 1, weight), (1, 3, weight), (0, 2, weight), (2, 3, weight)], [0], [3])


class TestDegradeNode(unittest.TestCase):
    """Single degradation steps."""

    def test_dangling_node_is_deleted(self):
        net = Network.create(range(3), [(0, 1, 0.3), (1, 2, 0.4)], [0], [1])
        degraded = degrade_node(net, 2, CLASSICAL)
        self.assertEqual(degraded.nodes, (0, 1))
        self.assertEqual(degraded.link_count, 1)
        self.assertAlmostEqual(degraded.links[0].theta, 0.3, places=12)

    def test_series_node(self):
        net = Network.create(range(3), [(0, 1, 0.3), (1, 2, 0.5)], [0], [2])
        degraded = degrade_node(net, 1, CONPT)
        self.assertEqual(degraded.link_count, 1)
        self.assertAlmostEqual(degraded.links[0].weight.c, LinkWeight(0.3).c * LinkWeight(0.5).c, places=12)

    def test_three_star_center(self):
        net = Network.create(range(4), [(0, 3, HALF), (1, 3, HALF), (2, 3, HALF)], [0], [1])
        degraded = degrade_node(net, 3, CLASSICAL)
        self.assertEqual(degraded.nodes, (0, 1, 2))
        self.assertEqual(degraded.link_count, 3)
        for link in degraded.links:
            self.assertAlmostEqual(link.weight.p, 0.21400, delta=5e-5)

    def test_parallel_results_merge(self):
        net = Network.create(range(3), [(0, 1, HALF), (1, 2, HALF), (0, 2, HALF)], [0], [2])
        degraded = degrade_node(net, 1, CLASSICAL)
        self.assertEqual(degraded.link_count, 1)
        self.assertAlmostEqual(degraded.links[0].weight.p, 0.625, places=9)

    def test_terminal_and_unknown_rejected(self):
        net = wheatstone()
        with self.assertRaises(ValidationError):
            degrade_node(net, 0, CLASSICAL)
        with self.assertRaises(ValidationError):
            degrade_node(net, 7, CLASSICAL)


class TestReduceToPair(unittest.TestCase):
    """Fixed-order two-terminal reductions."""

    def test_chain_is_power(self):
        m = 5
        net = Network.create(range(m + 1), [(i, i + 1, HALF) for i in range(m)])
        trace = reduce_to_pair(net, (0, m), CLASSICAL, [3, 1, 4, 2])
        self.assertAlmostEqual(trace.final_value, 0.5 ** m, places=12)
        self.assertEqual(trace.order, (3, 1, 4, 2))
        self.assertEqual(trace.per_step_max_degree, (2, 2, 2, 2))

    def test_two_paths(self):
        trace = reduce_to_pair(two_paths(), (0, 3), CLASSICAL, [1, 2])
        self.assertAlmostEqual(trace.final_value, 0.4375, places=12)

    def test_series_parallel_exact_for_conpt(self):
        weight = LinkWeight(0.5)
        trace = reduce_to_pair(two_paths(weight), (0, 3), CONPT, [2, 1])
        expected = compose_parallel(CONPT, [weight.c ** 2, weight.c ** 2])
        self.assertAlmostEqual(trace.final_value, expected, delta=1e-9)
        self.assertAlmostEqual(trace.final_theta.c, expected, delta=1e-9)

    def test_wheatstone_close_to_exact(self):
        trace = reduce_to_pair(wheatstone(), (0, 3), CLASSICAL, [1, 2])
        self.assertAlmostEqual(trace.final_value, 0.5, delta=0.02)
        self.assertEqual(trace.max_star, 3)

    def test_disconnected_nodes_are_dropped(self):
        net = Network.create(range(5), [(0, 1, HALF), (1, 2, HALF), (3, 4, HALF)])
        trace = reduce_to_pair(net, (0, 2), CLASSICAL, [1, 3, 4])
        self.assertEqual(sorted(trace.order), [1, 3, 4])
        self.assertAlmostEqual(trace.final_value, 0.25, places=12)

    def test_unreachable_terminals_give_zero(self):
        net = Network.create(range(4), [(0, 1, HALF), (2, 3, HALF)])
        self.assertEqual(reduce_to_pair(net, (0, 3), CLASSICAL, [1, 2]).final_value, 0.0)

    def test_order_must_cover_interior(self):
        with self.assertRaises(ValidationError):
            reduce_to_pair(wheatstone(), (0, 3), CLASSICAL, [1])
        with self.assertRaises(ValidationError):
            reduce_to_pair(wheatstone(), (0, 3), CLASSICAL, [1, 2, 3])
        with self.assertRaises(ValidationError):
            reduce_to_pair(wheatstone(), (0, 0), CLASSICAL, [1, 2, 3])

    def test_failure_carries_partial_trace(self):
        engine = ReductionEngine(CLASSICAL, n_max=2)
        net = Network.create(range(5), [(0, 4, HALF), (4, 1, HALF), (1, 2, HALF), (1, 3, HALF),
                                        (2, 3, HALF)])
        with self.assertRaises(ReductionError) as ctx:
            engine.reduce_to_pair(net, (0, 3), [4, 1, 2])
        self.assertEqual(ctx.exception.partial_trace["order"], (4,))


class TestSpongeCrossing(unittest.TestCase):
    """Randomized-order averages between boundaries."""

    def test_single_link(self):
        net = Network.create(range(2), [(0, 1, 0.4)], [0], [1])
        for rules in (CLASSICAL, CONPT):
            estimate = sponge_crossing(net, rules, runs=3, seed=1)
            self.assertAlmostEqual(estimate.mean, rules.measure(LinkWeight(0.4)), places=12)
            self.assertEqual(estimate.std, 0.0)
            self.assertEqual(estimate.runs, 3)

    def test_maximal_links_give_one(self):
        net = build_lattice(LatticeSpec(LatticeKind.SQUARE, 3), math.pi / 4)
        estimate = sponge_crossing(net, CONPT, runs=7, seed=2)
        self.assertEqual(estimate.mean, 1.0)
        self.assertEqual(estimate.std, 0.0)

    def test_square_three_matches_oracle(self):
        net = build_lattice(LatticeSpec(LatticeKind.SQUARE, 3), HALF)
        estimate = sponge_crossing(net, CLASSICAL, runs=7, seed=3)
        self.assertAlmostEqual(estimate.mean, brute_force_sc(net), delta=0.02)
        self.assertEqual(estimate.failed_runs, 0)
        self.assertEqual(list(estimate.values), sorted(estimate.values))

    def test_bethe_tree_matches_oracle(self):
        net = build_bethe(3, 2, LinkWeight.from_p(0.7))
        estimate = sponge_crossing(net, CLASSICAL, runs=3, seed=4)
        self.assertAlmostEqual(estimate.mean, brute_force_sc(net), delta=0.02)

    def test_order_robustness(self):
        net = build_lattice(LatticeSpec(LatticeKind.SQUARE, 4), LinkWeight(0.45))
        estimate = sponge_crossing(net, CONPT, runs=7, seed=5)
        thetas = CONPT.measure_to_theta(np.array(estimate.values))
        self.assertLessEqual(float(np.std(thetas)), 0.02 * math.pi / 4)

    def test_strategies_agree(self):
        net = read_network_file(str(TEST_DATA_DIR / "heterogeneous.net"))
        random_order = sponge_crossing(net, CLASSICAL, runs=7, seed=6, strategy="random")
        min_degree = sponge_crossing(net, CLASSICAL, runs=7, seed=6, strategy="min-degree")
        self.assertAlmostEqual(random_order.mean, min_degree.mean, delta=0.02)
        with self.assertRaises(ValidationError):
            sponge_crossing(net, CLASSICAL, strategy="treewidth")

    def test_conpt_beats_classical(self):
        net = read_network_file(str(TEST_DATA_DIR / "heterogeneous.net"))
        classical = sponge_crossing(net, CLASSICAL, runs=7, seed=7).mean
        conpt = sponge_crossing(net, CONPT, runs=7, seed=7).mean
        self.assertGreaterEqual(1.0 - math.sqrt(1.0 - conpt ** 2), classical - 0.02)

    def test_deterministic_and_schedule_independent(self):
        net = build_lattice(LatticeSpec(LatticeKind.HONEYCOMB, 4), LinkWeight(0.5))
        first = sponge_crossing(net, CONPT, runs=4, seed=8)
        second = sponge_crossing(net, CONPT, runs=4, seed=8, workers=2)
        self.assertEqual(first, second)

    def test_traces_and_logging(self):
        logger = Mock()
        net = two_paths()
        estimate = sponge_crossing(net, CLASSICAL, runs=2, seed=9, logger=logger)
        self.assertEqual(sorted(record["run"] for record in estimate.traces), [0, 1])
        self.assertTrue(all(len(record["order_hash"]) == 12 for record in estimate.traces))
        logger.info.assert_called()

    def test_detached_component_is_ignored(self):
        bridge = wheatstone()
        clique = [(a, b, HALF) for a in range(4, 8) for b in range(a + 1, 8)]
        dangling = Network.create(range(8), list(bridge.links) + clique, [0], [3])
        plain = sponge_crossing(bridge, CLASSICAL, runs=5, seed=10)
        padded = sponge_crossing(dangling, CLASSICAL, runs=5, seed=10)
        self.assertEqual(padded.values, plain.values)
        self.assertEqual([record["order_hash"] for record in padded.traces],
                         [record["order_hash"] for record in plain.traces])

    def test_all_runs_failing(self):
        with self.assertRaises(ReductionError):
            sponge_crossing(wheatstone(), CLASSICAL, runs=2, seed=1, n_max=2)

    def test_invalid_arguments(self):
        with self.assertRaises(ValidationError):
            sponge_crossing(wheatstone(), CLASSICAL, runs=0)
        with self.assertRaises(ValidationError):
            sponge_crossing(Network.create(range(2), [(0, 1, 0.3)]), CLASSICAL)


def test_classical_agreement_on_random_networks():
    """The engine stays within 0.02 of the exact oracle on small random graphs."""
    rng = np.random.default_rng(2021)
    for _ in range(25):
        net = random_connected_network(rng, max_nodes=7, max_links=10)
        estimate = sponge_crossing(net, CLASSICAL, runs=7, seed=int(rng.integers(1 << 30)))
        assert estimate.mean == pytest.approx(brute_force_sc(net), abs=0.02)
        assert estimate.std <= 0.02
