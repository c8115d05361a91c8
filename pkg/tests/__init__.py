"""
Test Suite for the ConPT percolation toolkit

This package contains the test cases for every module of the toolkit:
- Link weights and the series/parallel rule systems
- Network model, lattice builders and the edge-list format
- Star-mesh solver and the reduction engine
- Bethe-lattice recursions and closed forms
- Classical oracles, scaling fits and the threshold-table calculators
- CSV input/output and the command-line runner

Test Structure:
- test_weights.py, test_network.py, test_network_io.py: data model tests
- test_star_mesh.py, test_reduction.py: reduction engine tests
- test_bethe.py, test_oracle.py, test_scaling.py: solver and fit tests
- test_csv_reader.py, test_file_exporter.py, test_common_utils.py: I/O and utilities
- test_integration.py: End-to-end command-line tests
- test_acceptance.py: Long-running reproduction checks (marked slow)

Sample Data:
- sample_data/: Test input files (network documents)
- output/: Test output files
"""

import sys
from pathlib import Path

# Add project root to Python path for imports
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

# Test configuration
TEST_DATA_DIR = Path(__file__).parent / "sample_data"
TEST_OUTPUT_DIR = Path(__file__).parent / "output"

# Ensure test directories exist
TEST_DATA_DIR.mkdir(exist_ok=True)
TEST_OUTPUT_DIR.mkdir(exist_ok=True)

__version__ = "1.0.0"
__author__ = "ConPT Development Team"
