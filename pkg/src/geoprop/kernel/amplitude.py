"""Factors of the short-time kernel: action, van Vleck amplitude and cutoff.

The kernel at geodesic distance ``r`` is

    K(t, r) = (2 pi i)^(-n/2) chi(r) a(t, r) exp(i r^2 / 2t),
    a(t, r) = t^(-n/2) det g(r)^(-1/4),

with the principal branch (2 pi i)^(-n/2) = (2 pi)^(-n/2) exp(-i pi n / 4).
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from geoprop.core.errors import DomainError, ResolutionError
from geoprop.geometry import ManifoldModel

from .cutoff import CutoffProfile

logger = logging.getLogger(__name__)


def _require_positive_time(t: float) -> None:
    if not t > 0:
        raise DomainError(
            code="kernel.nonpositive_time",
            message="Kernel time must be positive.",
            details={"t": t},
        )


def phase_prefactor(n: int) -> complex:
    """(2 pi i)^(-n/2) on the principal branch."""

    return (2 * math.pi) ** (-n / 2) * cmath.exp(-0.25j * math.pi * n)


def action(t: float, r: ArrayLike) -> NDArray[np.float64]:
    """Classical action r^2 / 2t of the minimizing geodesic."""

    _require_positive_time(t)
    radius = np.asarray(r, dtype=np.float64)
    return radius**2 / (2.0 * t)


def van_vleck_sqrt(m: ManifoldModel, t: float, r: ArrayLike) -> NDArray[np.float64]:
    """Amplitude a(t, r) = sqrt(V) = t^(-n/2) det g(r)^(-1/4)."""

    _require_positive_time(t)
    return t ** (-m.dimension / 2) * m.normal_metric_det(r) ** -0.25


def kernel_value(
    m: ManifoldModel, cutoff: CutoffProfile, t: float, r: ArrayLike
) -> NDArray[np.complex128]:
    """Short-time kernel at geodesic distance ``r``; zero for r >= support."""

    radius = m.check_radius(r)
    inside = radius < cutoff.support
    local = np.where(inside, radius, 0.0)
    value = (
        phase_prefactor(m.dimension)
        * cutoff(local)
        * van_vleck_sqrt(m, t, local)
        * np.exp(1j * action(t, local))
    )
    return np.where(inside, value, 0.0)


@dataclass(frozen=True, slots=True)
class KernelFactors:
    """Radial callables of the kernel at a fixed time."""

    manifold: ManifoldModel
    cutoff: CutoffProfile
    t: float
    prefactor: complex

    @classmethod
    def build(cls, m: ManifoldModel, cutoff: CutoffProfile, t: float) -> KernelFactors:
        _require_positive_time(t)
        if cutoff.support >= m.injectivity_radius:
            raise DomainError(
                code="kernel.support",
                message="Cutoff support must lie inside the injectivity radius.",
                details={"support": cutoff.support, "injectivity_radius": m.injectivity_radius},
            )
        return cls(m, cutoff, t, phase_prefactor(m.dimension))

    def action(self, r: ArrayLike) -> NDArray[np.float64]:
        return action(self.t, r)

    def amplitude(self, r: ArrayLike) -> NDArray[np.float64]:
        return van_vleck_sqrt(self.manifold, self.t, r)

    def chi(self, r: ArrayLike) -> NDArray[np.float64]:
        return self.cutoff(r)

    def kernel(self, r: ArrayLike) -> NDArray[np.complex128]:
        return kernel_value(self.manifold, self.cutoff, self.t, r)


def _radial_laplacian_at_origin(m: ManifoldModel, t: float, h: float) -> float:
    # central second differences along each normal-coordinate axis; every
    # stencil point sits at distance h from the base point
    centre = float(van_vleck_sqrt(m, t, 0.0))
    offset = float(van_vleck_sqrt(m, t, h))
    return m.dimension * 2.0 * (offset - centre) / h**2


def curvature_limit_check(
    m: ManifoldModel, t: float, h: float = 1e-3, *, tolerance: float = 1e-6
) -> float:
    """Laplacian of a(t, ., y) at x = y, Richardson-extrapolated from steps h and h/2.

    Tends to t^(-n/2) R / 6. Raises ResolutionError when the two step sizes
    disagree by more than ``tolerance`` after extrapolation.
    """

    _require_positive_time(t)
    if not 0 < h < m.injectivity_radius:
        raise ResolutionError(
            "Finite-difference step must lie in (0, injectivity radius).",
            step=h,
            injectivity_radius=m.injectivity_radius,
        )

    coarse = _radial_laplacian_at_origin(m, t, h)
    fine = _radial_laplacian_at_origin(m, t, h / 2)
    extrapolated = (4.0 * fine - coarse) / 3.0
    disagreement = abs(extrapolated - fine)

    logger.debug(
        "curvature_limit_refined",
        extra={"manifold": m.key, "t": t, "step": h, "value": extrapolated, "estimate": disagreement},
    )
    if disagreement > tolerance:
        raise ResolutionError(
            "Finite-difference step too large for the curvature limit.",
            step=h,
            coarse=coarse,
            fine=fine,
            disagreement=disagreement,
        )
    return extrapolated


def mean_curvature(m: ManifoldModel, r: ArrayLike) -> NDArray[np.float64]:
    """H(r) = g'(r)/g(r) for the polar density g of ``m``."""

    return m.mean_curvature(r)


def transport_residual(
    m: ManifoldModel, t: float, r: float, step: float = 1e-5
) -> float:
    """|da/dt + (r/t) da/dr + (a/2t)(1 + r H(r))| by central differences."""

    _require_positive_time(t)
    if not (step < t and step <= r and r + step < m.injectivity_radius):
        raise ResolutionError(
            "Transport residual step does not fit around (t, r).",
            t=t,
            r=r,
            step=step,
        )

    a = float(van_vleck_sqrt(m, t, r))
    da_dt = float(van_vleck_sqrt(m, t + step, r) - van_vleck_sqrt(m, t - step, r)) / (2 * step)
    da_dr = float(van_vleck_sqrt(m, t, r + step) - van_vleck_sqrt(m, t, r - step)) / (2 * step)
    h_term = float(r * mean_curvature(m, r))
    return abs(da_dt + (r / t) * da_dr + (a / (2 * t)) * (1 + h_term))


__all__ = [
    "KernelFactors",
    "action",
    "curvature_limit_check",
    "kernel_value",
    "mean_curvature",
    "phase_prefactor",
    "transport_residual",
    "van_vleck_sqrt",
]
