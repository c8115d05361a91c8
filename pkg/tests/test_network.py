#!/usr/bin/env python3
"""
Test cases for the network model and its generators.

Covers:
- Network normalization and validation
- Square, honeycomb and triangular lattices
- Finite Bethe lattices
- Boundary contraction, dilution and pruning
"""

import math
import sys
import unittest
from pathlib import Path

import numpy as np
from scipy import stats

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from modules.exceptions import ValidationError
from modules.network import (
    LatticeKind, LatticeSpec, Network, boundary_representatives, build_bethe, build_lattice,
    contract_boundaries, detached_nodes, dilute, drop_disconnected, random_connected_network
)
from modules.weights import LinkWeight

QUARTER = math.pi / 4


class TestNetwork(unittest.TestCase):
    """Construction and validation of the multigraph."""

    def test_links_are_normalized(self):
        net = Network.create([2, 0, 1], [(1, 0, 0.3), (2, 1, 0.2), (0, 1, 0.1)])
        self.assertEqual(net.nodes, (0, 1, 2))
        self.assertEqual([(link.a, link.b, link.theta) for link in net.links],
                         [(0, 1, 0.1), (0, 1, 0.3), (1, 2, 0.2)])

    def test_same_multigraph_compares_equal(self):
        first = Network.create(range(3), [(0, 1, 0.3), (1, 2, 0.2)], [0], [2])
        second = Network.create([2, 1, 0], [(2, 1, 0.2), (1, 0, 0.3)], [0], [2])
        self.assertEqual(first, second)

    def test_self_loops_dropped(self):
        net = Network.create(range(2), [(0, 0, 0.3), (0, 1, 0.2)])
        self.assertEqual(net.link_count, 1)

    def test_unknown_endpoint_rejected(self):
        with self.assertRaises(ValidationError) as ctx:
            Network.create(range(2), [(0, 9, 0.3)])
        self.assertIn("9", str(ctx.exception))

    def test_overlapping_boundaries_rejected(self):
        with self.assertRaises(ValidationError):
            Network.create(range(3), [(0, 1, 0.3), (1, 2, 0.3)], [0, 1], [1, 2])

    def test_degree_and_neighbors(self):
        net = Network.create(range(3), [(0, 1, 0.3), (0, 1, 0.2), (1, 2, 0.1)])
        self.assertEqual(net.degree(1), 3)
        self.assertEqual(net.neighbors(1), [0, 2])
        self.assertEqual(net.to_networkx().number_of_edges(), 3)

    def test_with_uniform_weight(self):
        net = Network.create(range(3), [(0, 1, 0.3), (1, 2, 0.1)], [0], [2])
        uniform = net.with_uniform_weight(LinkWeight(0.5))
        self.assertEqual({link.theta for link in uniform.links}, {0.5})
        self.assertEqual(uniform.boundary_b, frozenset({2}))


class TestLattices(unittest.TestCase):
    """Lattice generators."""

    def test_square_counts(self):
        small = build_lattice(LatticeSpec(LatticeKind.SQUARE, 2), 0.4)
        self.assertEqual((len(small.nodes), small.link_count), (4, 4))
        self.assertEqual((len(small.boundary_a), len(small.boundary_b)), (2, 2))
        five = build_lattice(LatticeSpec(LatticeKind.SQUARE, 5), math.pi / 8)
        self.assertEqual((len(five.nodes), five.link_count), (25, 40))

    def test_triangular_adds_one_diagonal_per_cell(self):
        net = build_lattice(LatticeSpec(LatticeKind.TRIANGULAR, 2), 0.4)
        self.assertEqual((len(net.nodes), net.link_count), (4, 5))
        self.assertEqual(build_lattice(LatticeSpec("triangular", 4), 0.4).link_count, 24 + 9)

    def test_honeycomb_is_a_brick_wall(self):
        net = build_lattice(LatticeSpec(LatticeKind.HONEYCOMB, 3), 0.4)
        self.assertEqual(net.link_count, 9)
        self.assertTrue(all(net.degree(node) <= 3 for node in net.nodes))
        self.assertTrue(net.is_connected())

    def test_boundaries_are_outer_columns(self):
        net = build_lattice(LatticeSpec(LatticeKind.SQUARE, 3), 0.4)
        self.assertEqual(net.boundary_a, frozenset({0, 3, 6}))
        self.assertEqual(net.boundary_b, frozenset({2, 5, 8}))

    def test_generators_are_deterministic(self):
        for kind in LatticeKind:
            spec = LatticeSpec(kind, 4)
            self.assertEqual(build_lattice(spec, 0.3), build_lattice(spec, 0.3))

    def test_invalid_spec(self):
        with self.assertRaises(ValidationError):
            LatticeSpec(LatticeKind.SQUARE, 1)
        with self.assertRaises(ValidationError):
            LatticeSpec("kagome", 4)


class TestBethe(unittest.TestCase):
    """Finite Bethe lattices."""

    def test_counts(self):
        for k, layers, nodes in [(3, 1, 4), (3, 2, 10), (4, 2, 17)]:
            net = build_bethe(k, layers, 0.5)
            self.assertEqual(len(net.nodes), nodes)
            self.assertEqual(net.link_count, nodes - 1)

    def test_root_and_leaves(self):
        net = build_bethe(3, 3, 0.5)
        self.assertEqual(net.boundary_a, frozenset({0}))
        self.assertEqual(len(net.boundary_b), 3 * 2 * 2)
        self.assertEqual(net.degree(0), 3)
        self.assertTrue(all(net.degree(leaf) == 1 for leaf in net.boundary_b))

    def test_invalid(self):
        with self.assertRaises(ValidationError):
            build_bethe(2, 3, 0.5)
        with self.assertRaises(ValidationError):
            build_bethe(3, 0, 0.5)


class TestBoundariesAndDilution(unittest.TestCase):
    """Contraction, dilution and pruning."""

    def test_singleton_boundaries_unchanged(self):
        net = Network.create(range(3), [(0, 1, 0.3), (1, 2, 0.3)], [0], [2])
        self.assertIs(contract_boundaries(net), net)

    def test_pair_boundary_gains_one_link(self):
        net = Network.create(range(4), [(0, 2, 0.3), (1, 2, 0.3), (2, 3, 0.3)], [0, 1], [3])
        contracted = contract_boundaries(net)
        added = [link for link in contracted.links if (link.a, link.b) == (0, 1)]
        self.assertEqual(len(added), 1)
        self.assertEqual(added[0].theta, QUARTER)

    def test_square_three_gains_two_cliques(self):
        net = build_lattice(LatticeSpec(LatticeKind.SQUARE, 3), 0.2)
        contracted = contract_boundaries(net)
        self.assertEqual(contracted.link_count - net.link_count, 6)
        self.assertEqual(contracted.nodes, net.nodes)
        self.assertEqual(boundary_representatives(contracted), (0, 2))

    def test_missing_boundary(self):
        net = Network.create(range(2), [(0, 1, 0.3)], [0], [])
        with self.assertRaises(ValidationError):
            contract_boundaries(net)

    def test_full_retention_is_identity(self):
        net = build_bethe(3, 4, 0.4)
        self.assertEqual(dilute(net, 1.0, seed=3), net)

    def test_tiny_fraction_removes_almost_everything(self):
        net = build_lattice(LatticeSpec(LatticeKind.SQUARE, 8), 0.4)
        self.assertLessEqual(dilute(net, 1e-6, seed=11).link_count, 1)

    def test_dilution_is_seeded(self):
        net = build_lattice(LatticeSpec(LatticeKind.SQUARE, 5), 0.4)
        self.assertEqual(dilute(net, 0.5, 42), dilute(net, 0.5, 42))

    def test_invalid_fraction(self):
        net = build_bethe(3, 2, 0.4)
        for f in (0.0, -0.1, 1.5):
            with self.assertRaises(ValidationError):
                dilute(net, f, 1)

    def test_drop_disconnected(self):
        net = Network.create(range(5), [(0, 1, 0.3), (1, 2, 0.3), (3, 4, 0.3)], [0], [2, 4])
        pruned = drop_disconnected(net, [0])
        self.assertEqual(pruned.nodes, (0, 1, 2))
        self.assertEqual(pruned.boundary_b, frozenset({2}))
        self.assertIs(drop_disconnected(pruned, [0]), pruned)

    def test_detached_nodes(self):
        net = Network.create(range(6), [(0, 1, 0.3), (2, 3, 0.3), (4, 5, 0.3)])
        self.assertEqual(detached_nodes(net.to_networkx(), [0, 5]), [2, 3])
        self.assertEqual(detached_nodes(net.to_networkx(), [9]), [0, 1, 2, 3, 4, 5])


def test_dilution_retains_fraction_iid():
    """Kept links are Bernoulli(f) per link and independent of the link."""
    net = build_bethe(3, 6, 0.5)
    seeds = 2000
    position = {(link.a, link.b): index for index, link in enumerate(net.links)}
    kept = np.zeros(net.link_count)
    for seed in range(seeds):
        for link in dilute(net, 0.8, seed).links:
            kept[position[(link.a, link.b)]] += 1
    assert abs(kept.sum() / (seeds * net.link_count) - 0.8) <= 0.01
    assert stats.chisquare(kept).pvalue > 1e-3


def test_random_networks_are_connected():
    rng = np.random.default_rng(5)
    for _ in range(50):
        net = random_connected_network(rng, max_nodes=8, max_links=12)
        assert net.is_connected()
        assert net.link_count <= 12
        assert net.has_boundaries
