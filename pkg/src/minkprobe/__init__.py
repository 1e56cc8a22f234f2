"""Reconstruction of convex bodies from sampled outer normals."""
__version__ = "0.1.0"

from .errors import MinkprobeError  # noqa: E402,F401
