#!/usr/bin/env python3
"""
Test cases for edge-list network documents.

Covers:
- Parsing valid documents and reporting errors with line/column
- Canonical save and load/save stability
- File reading with validation and atomic writing
"""

import math
import shutil
import sys
import tempfile
import unittest
from pathlib import Path

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from modules.exceptions import FileSecurityError, NetworkFormatError
from modules.network import LatticeKind, LatticeSpec, build_lattice
from modules.network_io import load_network, read_network_file, save_network, write_network_file
from tests import TEST_DATA_DIR


class TestLoadNetwork(unittest.TestCase):
    """Parsing edge-list text."""

    def test_minimal_document(self):
        net = load_network("node 0\nnode 1\nlink 0 1 0.7853981633974483")
        self.assertEqual(net.nodes, (0, 1))
        self.assertEqual(net.link_count, 1)
        self.assertAlmostEqual(net.links[0].theta, math.pi / 4, places=15)

    def test_comments_and_forward_references(self):
        text = "# two links\n\nlink 0 1 0.2\nlink 1 2 0.3\nnode 2\nnode 1\nnode 0\nboundary A 0\nboundary B 2\n"
        net = load_network(text)
        self.assertEqual(net.link_count, 2)
        self.assertEqual(net.boundary_a, frozenset({0}))
        self.assertEqual(net.boundary_b, frozenset({2}))

    def test_unknown_node_named_with_location(self):
        with self.assertRaises(NetworkFormatError) as ctx:
            load_network("node 0\nnode 1\nlink 0 9 0.3\n")
        self.assertIn("9", str(ctx.exception))
        self.assertEqual(ctx.exception.line_number, 3)
        self.assertEqual(ctx.exception.column, 8)

    def test_theta_out_of_range(self):
        with self.assertRaises(NetworkFormatError) as ctx:
            load_network("node 0\nnode 1\nlink 0 1 1.2\n")
        self.assertEqual(ctx.exception.line_number, 3)

    def test_duplicate_boundary_membership(self):
        with self.assertRaises(NetworkFormatError):
            load_network("node 0\nnode 1\nlink 0 1 0.3\nboundary A 0\nboundary B 0\n")

    def test_malformed_records(self):
        for text in ("node x\n", "node 0\nnode 0\n", "edge 0 1 0.3\n", "node 0\nnode 1\nlink 0 1\n",
                     "node 0\nboundary C 0\n", "node 0\nnode 1\nlink 0 1 abc\n"):
            with self.assertRaises(NetworkFormatError):
                load_network(text)


class TestSaveNetwork(unittest.TestCase):
    """Canonical documents and files."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_canonical_order(self):
        net = load_network("node 2\nnode 0\nnode 1\nlink 2 1 0.3\nlink 1 0 0.5\nlink 0 1 0.1\nboundary B 2\n"
                           "boundary A 0\n")
        self.assertEqual(save_network(net),
                         "node 0\nnode 1\nnode 2\nlink 0 1 0.1\nlink 0 1 0.5\nlink 1 2 0.3\n"
                         "boundary A 0\nboundary B 2\n")

    def test_load_save_is_stable(self):
        net = build_lattice(LatticeSpec(LatticeKind.TRIANGULAR, 4), 0.123456789)
        text = save_network(net)
        self.assertEqual(load_network(text), net)
        self.assertEqual(save_network(load_network(text)), text)

    def test_heterogeneous_sample(self):
        net = read_network_file(str(TEST_DATA_DIR / "heterogeneous.net"))
        self.assertEqual(len(net.nodes), 6)
        self.assertEqual(net.link_count, 8)
        self.assertEqual(net.boundary_a, frozenset({0, 1}))
        self.assertEqual(net.boundary_b, frozenset({4, 5}))
        self.assertEqual(load_network(save_network(net)), net)

    def test_file_round_trip(self):
        net = build_lattice(LatticeSpec(LatticeKind.HONEYCOMB, 4), 0.4)
        path = Path(self.temp_dir) / "honeycomb.net"
        write_network_file(str(path), net)
        self.assertEqual(read_network_file(str(path)), net)
        self.assertEqual(list(Path(self.temp_dir).iterdir()), [path])

    def test_rejected_paths(self):
        with self.assertRaises(FileSecurityError):
            read_network_file(str(Path(self.temp_dir) / "missing.net"))
        wrong = Path(self.temp_dir) / "network.svg"
        wrong.write_text("node 0\n", encoding="utf-8")
        with self.assertRaises(FileSecurityError):
            read_network_file(str(wrong))
