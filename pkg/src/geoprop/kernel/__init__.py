from __future__ import annotations

from .amplitude import (
    KernelFactors,
    action,
    curvature_limit_check,
    kernel_value,
    mean_curvature,
    phase_prefactor,
    transport_residual,
    van_vleck_sqrt,
)
from .cutoff import CutoffProfile

__all__: list[str] = [
    "CutoffProfile",
    "KernelFactors",
    "action",
    "curvature_limit_check",
    "kernel_value",
    "mean_curvature",
    "phase_prefactor",
    "transport_residual",
    "van_vleck_sqrt",
]
