"""Franson two-photon interference with generalized-uncertainty-principle corrections."""
__version__ = "0.1.0"
