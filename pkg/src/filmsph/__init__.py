"""Weakly-compressible SPH for laminar lubrication films, with slider-bearing analytics."""

__version__ = "0.1.0"
