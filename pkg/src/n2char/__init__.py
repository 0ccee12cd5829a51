"""Characters of the N=2 superconformal minimal-type algebras at c = 3(1 - 2p'/p)."""

__version__ = "0.1.0"
