"""
ConPT percolation toolkit modules.

Sponge-crossing connectivity of weighted networks under classical bond
percolation and concurrence percolation rules.
"""

from modules.version import __version__

__all__ = ["__version__"]
