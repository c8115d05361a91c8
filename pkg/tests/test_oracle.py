#!/usr/bin/env python3
"""
Test cases for the classical sponge-crossing oracles.

Covers:
- Boundary collapsing
- Single-configuration crossing checks (union-find and BFS)
- Exact enumeration, Monte Carlo and Newman-Ziff curves
"""

import math
import sys
import unittest
from pathlib import Path

import numpy as np

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from modules.exceptions import OracleLimitError, ValidationError
from modules.network import LatticeKind, LatticeSpec, Network, build_lattice, random_connected_network
from modules.oracle import (
    CrossingSample, UnionFind, brute_force_sc, collapse_boundaries, crossing_bfs, crossing_union_find,
    monte_carlo_sc, newman_ziff_curve
)
from modules.weights import LinkWeight

HALF = LinkWeight.from_p(0.5)


def wheatstone(weight=HALF):
    return Network.create(range(4), [(0, 1, weight), (0, 2, weight), (1, 2, weight), (1, 3, weight),
                                     (2, 3, weight)], [0], [3])


class TestCollapse(unittest.TestCase):
    """Super nodes for the boundaries."""

    def test_boundary_links_are_dropped(self):
        net = Network.create(range(4), [(0, 1, 0.3), (1, 2, 0.3), (2, 3, 0.3)], [0, 1], [3])
        collapsed = collapse_boundaries(net)
        self.assertEqual(collapsed.node_count, 3)
        self.assertEqual(collapsed.p.size, 2)
        self.assertEqual(collapsed.link_index.tolist(), [1, 2])

    def test_detached_links_are_dropped(self):
        bridge = [(0, 1, 0.3), (0, 2, 0.3), (1, 2, 0.3), (1, 3, 0.3), (2, 3, 0.3)]
        clique = [(a, b, 0.3) for a in range(4, 12) for b in range(a + 1, 12)]
        net = Network.create(range(12), bridge + clique, [0], [3])
        collapsed = collapse_boundaries(net)
        self.assertEqual(collapsed.node_count, 4)
        self.assertEqual(collapsed.link_index.tolist(), [0, 1, 2, 3, 4])
        plain = Network.create(range(4), bridge, [0], [3])
        self.assertAlmostEqual(brute_force_sc(net), brute_force_sc(plain), places=12)

    def test_missing_boundary(self):
        with self.assertRaises(ValidationError):
            collapse_boundaries(Network.create(range(2), [(0, 1, 0.3)]))

    def test_union_find(self):
        sets = UnionFind(5)
        self.assertTrue(sets.union(0, 1))
        self.assertTrue(sets.union(3, 4))
        self.assertFalse(sets.union(1, 0))
        self.assertTrue(sets.connected(0, 1))
        self.assertFalse(sets.connected(1, 3))


class TestSingleConfiguration(unittest.TestCase):
    """Crossing checks for one set of open links."""

    def test_bridge_path(self):
        net = wheatstone()
        # 0-1, 1-2, 2-3 open: the path through the bridge
        mask = [True, False, True, False, True]
        self.assertTrue(crossing_union_find(net, mask))
        self.assertTrue(crossing_bfs(net, mask))
        self.assertFalse(crossing_union_find(net, [True, True, True, False, False]))

    def test_checks_agree_on_random_states(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            net = random_connected_network(rng, max_nodes=8, max_links=12)
            mask = rng.random(net.link_count) < 0.5
            self.assertEqual(crossing_union_find(net, mask), crossing_bfs(net, mask))

    def test_mask_length(self):
        with self.assertRaises(ValidationError):
            crossing_bfs(wheatstone(), [True, False])


class TestExactEnumeration(unittest.TestCase):
    """Sum over all link states."""

    def test_single_link(self):
        net = Network.create(range(2), [(0, 1, LinkWeight.from_p(0.3))], [0], [1])
        self.assertAlmostEqual(brute_force_sc(net), 0.3, places=12)

    def test_series_and_parallel(self):
        w = LinkWeight.from_p(0.3)
        series = Network.create(range(3), [(0, 1, w), (1, 2, w)], [0], [2])
        parallel = Network.create(range(2), [(0, 1, w), (0, 1, w)], [0], [1])
        self.assertAlmostEqual(brute_force_sc(series), 0.09, places=12)
        self.assertAlmostEqual(brute_force_sc(parallel), 1.0 - 0.7 ** 2, places=12)

    def test_wheatstone_is_self_dual(self):
        self.assertAlmostEqual(brute_force_sc(wheatstone()), 0.5, places=12)

    def test_no_links_between_boundaries(self):
        net = Network.create(range(3), [(0, 1, 0.3)], [0, 1], [2])
        self.assertEqual(brute_force_sc(net), 0.0)

    def test_link_limit(self):
        net = build_lattice(LatticeSpec(LatticeKind.SQUARE, 5), HALF)
        with self.assertRaises(OracleLimitError):
            brute_force_sc(net)


class TestSampling(unittest.TestCase):
    """Monte Carlo and Newman-Ziff estimates."""

    def test_sample_validation(self):
        sample = CrossingSample(100, 25)
        self.assertEqual(sample.estimate, 0.25)
        self.assertAlmostEqual(sample.stderr, math.sqrt(0.25 * 0.75 / 100), places=12)
        for trials, hits in [(0, 0), (10, 11), (10, -1)]:
            with self.assertRaises(ValidationError):
                CrossingSample(trials, hits)

    def test_monte_carlo_within_three_sigma(self):
        net = build_lattice(LatticeSpec(LatticeKind.SQUARE, 3), LinkWeight.from_p(0.6))
        sample = monte_carlo_sc(net, trials=20000, seed=3)
        self.assertLessEqual(abs(sample.estimate - brute_force_sc(net)), 3 * sample.stderr + 1e-9)

    def test_monte_carlo_is_deterministic(self):
        net = wheatstone()
        first = monte_carlo_sc(net, trials=12000, seed=9)
        self.assertEqual(first, monte_carlo_sc(net, trials=12000, seed=9, workers=2))
        self.assertEqual(first.trials, 12000)

    def test_monte_carlo_without_crossing_links(self):
        net = Network.create(range(3), [(0, 1, 0.3)], [0, 1], [2])
        self.assertEqual(monte_carlo_sc(net, trials=10).hits, 0)
        with self.assertRaises(ValidationError):
            monte_carlo_sc(net, trials=0)

    def test_newman_ziff_curve(self):
        net = build_lattice(LatticeSpec(LatticeKind.SQUARE, 3), HALF)
        ps = [0.0, 0.3, 0.5, 0.7, 1.0]
        curve = newman_ziff_curve(net, ps, trials=20000, seed=4)
        self.assertEqual(curve.estimates[0], 0.0)
        self.assertAlmostEqual(curve.estimates[-1], 1.0, places=12)
        self.assertTrue(np.all(np.diff(curve.estimates) >= 0.0))
        for p, estimate, stderr in zip(ps[1:-1], curve.estimates[1:-1], curve.stderrs[1:-1]):
            exact = brute_force_sc(net.with_uniform_weight(LinkWeight.from_p(p)))
            self.assertLessEqual(abs(estimate - exact), 3 * stderr + 1e-3)

    def test_newman_ziff_rejects_bad_grid(self):
        with self.assertRaises(ValidationError):
            newman_ziff_curve(wheatstone(), [0.5, 1.2], trials=10)
