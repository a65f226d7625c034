"""Optimal common color gamuts for tiled multi-projector displays.

Given the measured parallelepiped gamuts of the projectors in a tiled
display, this package selects a standard gamut every unit can show:
black/white selection by luminosity-ratio maximization, volume
maximization over the remaining six degrees of freedom, a quasiconvex
min-max alternative over all twelve, and an automated five-step
baseline, each with brute-force oracles for verification.
"""

from . import errors
from .colors import (
    Chroma,
    CornerSet,
    Gamut,
    chromaticity,
    derive_corners,
    device_transform,
    gamut_halfspaces,
    luminosity,
    luminosity_ratio,
)
from .polytope import (
    Halfspace,
    Polytope,
    classify_facets,
    contains_point,
    face_lattice,
    intersect_halfspaces,
    pulling_triangulation,
    ray_extent,
)

__version__ = "0.1.0"

__all__ = [
    "Chroma",
    "CornerSet",
    "Gamut",
    "Halfspace",
    "Polytope",
    "chromaticity",
    "classify_facets",
    "contains_point",
    "derive_corners",
    "device_transform",
    "errors",
    "face_lattice",
    "gamut_halfspaces",
    "intersect_halfspaces",
    "luminosity",
    "luminosity_ratio",
    "pulling_triangulation",
    "ray_extent",
]
