"""Pseudo-spectral laboratory for the 2.5D electron-MHD system with split fractional dissipation."""

__version__ = "0.1.0"
