from __future__ import annotations

from .basis import (
    EigenBasis,
    EigenLevel,
    eigenbasis,
    eigenlevels,
    orthonormality_defect,
    spectral_grid,
    zonal_profile,
)
from .state import (
    SpectralState,
    exact_propagate,
    l2_error,
    project,
    propagator_phases,
    sobolev_norm,
)

__all__: list[str] = [
    "EigenBasis",
    "EigenLevel",
    "SpectralState",
    "eigenbasis",
    "eigenlevels",
    "exact_propagate",
    "l2_error",
    "orthonormality_defect",
    "project",
    "propagator_phases",
    "sobolev_norm",
    "spectral_grid",
    "zonal_profile",
]
