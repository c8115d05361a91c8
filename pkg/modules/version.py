#!/usr/bin/env python3
"""
Version information for the ConPT percolation toolkit.
"""

__version__ = "1.0.0"
__license__ = "MIT"


def get_version():
    """Get the full version string."""
    return __version__
