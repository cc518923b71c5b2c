"""Rotational flow subsolutions on a planar annulus, with numerical verification tools."""

__version__ = "0.1.0"

from .geometry import (
    AnnulusGeometry,
    SubsolutionParams,
    ValidationReport,
    boundary_distance,
    cartesian_to_polar,
    polar_to_cartesian,
    validate_params,
)

__all__ = [
    "AnnulusGeometry",
    "SubsolutionParams",
    "ValidationReport",
    "boundary_distance",
    "cartesian_to_polar",
    "polar_to_cartesian",
    "validate_params",
    "__version__",
]
