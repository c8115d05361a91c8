#!/usr/bin/env python3
"""
Test runner for the ConPT test suite.

This script runs the test modules through pytest with the suite's
pytest.ini and prints a summary.
Usage:
    python run_tests.py                    # Run all fast tests
    python run_tests.py --verbose          # Run with verbose output
    python run_tests.py --specific <test>  # Run specific test module
    python run_tests.py --slow             # Run the long reproduction checks only
"""

import argparse
import sys
from pathlib import Path

import pytest

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

TEST_DIR = Path(__file__).parent


def build_pytest_args(test_pattern=None, verbose=False, slow=False):
    """Command line handed to pytest.main()."""
    args = ["-c", str(TEST_DIR / "pytest.ini"), "--rootdir", str(project_root)]
    if test_pattern:
        name = test_pattern if test_pattern.startswith("test_") else f"test_{test_pattern}"
        args.append(str(TEST_DIR / f"{name.removesuffix('.py')}.py"))
    else:
        args.append(str(TEST_DIR))
    if slow:
        args.extend(["-m", "slow"])
    if not verbose:
        args.append("-q")
    return args


def print_test_info():
    """Print information about available tests."""
    test_files = sorted(TEST_DIR.glob('test_*.py'))

    print("Available test modules:")
    for test_file in test_files:
        print(f"  - {test_file.stem}")

    print(f"\nTotal test modules: {len(test_files)}")


def main():
    """Main test runner entry point."""
    parser = argparse.ArgumentParser(description='ConPT Test Runner')
    parser.add_argument('--verbose', '-v', action='store_true',
                        help='Run with verbose output')
    parser.add_argument('--specific', '-s', type=str,
                        help='Run specific test module (e.g., bethe)')
    parser.add_argument('--list', '-l', action='store_true',
                        help='List available test modules')
    parser.add_argument('--slow', action='store_true',
                        help='Run the long-running reproduction checks')

    args = parser.parse_args()

    if args.list:
        print_test_info()
        return 0

    print("=" * 70)
    print("CONPT TEST SUITE")
    print("=" * 70)

    if args.specific:
        print(f"Running specific test: {args.specific}")
    elif args.slow:
        print("Running slow reproduction checks")
    else:
        print("Running all fast test suites")
    print("=" * 70)

    exit_code = int(pytest.main(build_pytest_args(args.specific, args.verbose, args.slow)))

    print("=" * 70)
    if exit_code == 0:
        print("✅ ALL TESTS PASSED")
    else:
        print("❌ SOME TESTS FAILED")
    print("=" * 70)

    return exit_code


if __name__ == '__main__':
    sys.exit(main())
