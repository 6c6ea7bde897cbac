"""Quadratic-phase stationary phase on a flat R^n patch.

    int chi(|x|) u(x) exp(i |x|^2 / 2t) dx
        ~ (2 pi i t)^(n/2) sum_{j<k} (i t Laplacian / 2)^j u(0) / j!

with a remainder of order t^(n/2 + k).
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Callable, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.special import gamma

from geoprop.core.errors import DomainError, QuadratureConvergenceError
from geoprop.kernel import CutoffProfile

from .radial import composite_gauss_legendre


def stationary_phase_expansion(
    laplacian_powers: Sequence[float], t: float, k: int, n: int
) -> complex:
    """Truncated expansion with ``laplacian_powers[j]`` = (Laplacian^j u)(0)."""

    if k < 1 or len(laplacian_powers) < k:
        raise DomainError(
            code="stationary_phase.order",
            message="Expansion order needs Laplacian powers up to k - 1.",
            details={"k": k, "available": len(laplacian_powers)},
        )
    leading = cmath.exp(0.5 * n * cmath.log(2j * math.pi * t))
    series = sum(
        (0.5j * t) ** j * laplacian_powers[j] / math.factorial(j) for j in range(k)
    )
    return complex(leading * series)


def gaussian_laplacian_powers(n: int, count: int, scale: float = 1.0) -> list[float]:
    """(Laplacian^j exp(-scale |x|^2))(0) in R^n for j < count.

    Equal to the falling factorial (-n/2)(-n/2 - 1)...(-n/2 - j + 1) times (4 scale)^j.
    """

    return [
        math.prod(-n / 2.0 - i for i in range(j)) * (4.0 * scale) ** j
        for j in range(count)
    ]


def gaussian_patch_exact(n: int, t: float, scale: float = 1.0) -> complex:
    """int exp(-scale |x|^2 + i |x|^2 / 2t) dx over all of R^n."""

    return complex(cmath.exp(0.5 * n * cmath.log(math.pi / (scale - 0.5j / t))))


def patch_integral(
    u: Callable[[NDArray[np.float64]], NDArray[np.float64]],
    t: float,
    cutoff: CutoffProfile,
    n: int,
    *,
    budget: int = 16,
    tolerance: float = 1e-12,
    max_refinements: int = 8,
) -> complex:
    """|S^(n-1)| int_0^support chi(r) u(r) exp(i r^2 / 2t) r^(n-1) dr for radial ``u``."""

    if not t > 0:
        raise DomainError(
            code="kernel.nonpositive_time",
            message="Kernel time must be positive.",
            details={"t": t},
        )
    sphere = 2.0 * math.pi ** (n / 2.0) / gamma(n / 2.0)
    wavelength = 2 * math.pi * t / cutoff.support
    panels = max(8, math.ceil(cutoff.support / wavelength))

    previous: complex | None = None
    trace = []
    for refinement in range(max_refinements + 1):
        edges = np.linspace(0.0, cutoff.support, panels * 2**refinement + 1)
        r, w = composite_gauss_legendre(edges, budget)
        integrand = cutoff(r) * u(r) * np.exp(0.5j * r**2 / t) * r ** (n - 1)
        value = complex(sphere * np.sum(w * integrand))
        if previous is not None:
            estimate = abs(value - previous)
            trace.append({"refinement": refinement, "nodes": int(r.size), "estimate": estimate})
            if estimate <= tolerance * max(1.0, abs(value)):
                return value
        previous = value

    raise QuadratureConvergenceError(
        f"Patch integral did not reach tolerance {tolerance} at t={t}", trace
    )


__all__ = [
    "gaussian_laplacian_powers",
    "gaussian_patch_exact",
    "patch_integral",
    "stationary_phase_expansion",
]
