"""Localized moment functionals, comparison bounds and blowup certificates
for the compressible Euler equations."""

__version__ = "0.1.0"
