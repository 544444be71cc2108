"""Jeu de taquin, Wronskians of polynomial subspaces and monodromy of real fibers.

Submodules are imported on demand so the command line can configure
threading before numpy loads.
"""

__version__ = "0.1.0"

__all__ = ["partitions", "tableaux", "jdt", "wronski", "leadterms", "tracker", "experiments", "cli"]
