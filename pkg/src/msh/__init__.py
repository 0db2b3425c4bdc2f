"""Multistep boundary maps on subset modules and their homology over GF(p)."""

__version__ = "0.1.0"
