"""Isospectral, non-isometric metric families on spheres and projective spaces."""

__version__ = "0.1.0"
