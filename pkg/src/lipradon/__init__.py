"""Exact Radon profiles of a recursive triangle set and checks of their regularity."""

__version__ = "0.1.0"

from .construction import TruncatedE, area_of_E, build
from .directions import Direction
from .field import QS3, SQRT3
from .geometry import Orientation, SignedRegion, StandardTriangle, cell, standard_triangle
from .radon import PLFunction, pl_metrics, region_profile, triangle_profile

__all__ = [
    "Direction",
    "Orientation",
    "PLFunction",
    "QS3",
    "SQRT3",
    "SignedRegion",
    "StandardTriangle",
    "TruncatedE",
    "area_of_E",
    "build",
    "cell",
    "pl_metrics",
    "region_profile",
    "standard_triangle",
    "triangle_profile",
]
