"""Balls, r-dual sets, and volume inequalities in constant-curvature spaces."""

from .geometry import (
    Ball,
    DegenerateGeodesicError,
    ModelError,
    OrientedHyperplane,
    Space,
    distance,
    space_from_name,
)

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "DegenerateGeodesicError",
    "ModelError",
    "OrientedHyperplane",
    "Space",
    "distance",
    "space_from_name",
    "__version__",
]
