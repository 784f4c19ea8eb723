"""Generalized Fourier transforms: Radon-type, spherical, line-complex and discrete hypergroup."""

__version__ = "0.1.0"
