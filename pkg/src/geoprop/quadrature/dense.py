"""Direct grid quadrature of the short-time propagator, used as an independent oracle."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import roots_legendre

from geoprop.core.errors import ResolutionError
from geoprop.geometry import Circle, FlatTorus, ManifoldModel, Sphere2
from geoprop.kernel import CutoffProfile, kernel_value
from geoprop.spectral import EigenLevel

logger = logging.getLogger(__name__)

DEFAULT_DENSE_BUDGET = 8
_CHUNK = 4
# exp(-SMOOTHNESS_DECAY) is the target size of the cutoff's spectral tail
SMOOTHNESS_DECAY = 28.0


@dataclass(frozen=True, slots=True)
class DenseGrid:
    """Quadrature points (chart coordinates) and weights covering the manifold."""

    points: NDArray[np.float64]
    weights: NDArray[np.float64]

    @property
    def size(self) -> int:
        return int(self.weights.size)


def cutoff_bandwidth(cutoff: CutoffProfile) -> float:
    """Frequency beyond which the cutoff transition's spectrum is below exp(-SMOOTHNESS_DECAY)."""

    return SMOOTHNESS_DECAY**2 / (2.0 * cutoff.sharpness * cutoff.width)


def dense_grid(
    m: ManifoldModel,
    cutoff: CutoffProfile,
    t: float,
    energy_max: float,
    budget: int = DEFAULT_DENSE_BUDGET,
    scale: float = 1.0,
) -> DenseGrid:
    """Grid resolving the kernel phase at the support radius, the top eigenfunction and the cutoff.

    Uniform grids on Circle and FlatTorus; Gauss-Legendre in cos(theta) times
    uniform longitude on Sphere2. ``scale`` multiplies every point count.
    """

    bandwidth = scale * (
        budget * (cutoff.support / t + math.sqrt(max(energy_max, 0.0))) + cutoff_bandwidth(cutoff)
    )

    if isinstance(m, Circle):
        count = math.ceil(m.radius * bandwidth)
        theta = 2 * math.pi * np.arange(count) / count
        return DenseGrid(theta[:, None], np.full(count, m.total_volume / count))

    if isinstance(m, FlatTorus):
        axes = []
        for period in m.periods:
            count = math.ceil(period * bandwidth / (2 * math.pi))
            axes.append(period * np.arange(count) / count)
        mesh = np.meshgrid(*axes, indexing="ij")
        points = np.stack([axis.ravel() for axis in mesh], axis=-1)
        return DenseGrid(points, np.full(points.shape[0], m.total_volume / points.shape[0]))

    if isinstance(m, Sphere2):
        n_theta = math.ceil(m.radius * bandwidth / 2) + 1
        n_phi = 2 * n_theta
        x, w = roots_legendre(n_theta)
        phi = 2 * math.pi * np.arange(n_phi) / n_phi
        theta_grid, phi_grid = np.meshgrid(np.arccos(x), phi, indexing="ij")
        points = np.stack([theta_grid.ravel(), phi_grid.ravel()], axis=-1)
        weights = np.repeat(w, n_phi) * (2 * math.pi / n_phi) * m.radius**2
        return DenseGrid(points, weights)

    raise TypeError(f"Unsupported manifold {m!r}")  # pragma: no cover


def dense_apply(
    m: ManifoldModel,
    cutoff: CutoffProfile,
    t: float,
    grid: DenseGrid,
    samples: ArrayLike,
    targets: ArrayLike | None = None,
) -> NDArray[np.complex128]:
    """(U_chi(t) f)(x) = int_M K(t, d(x, y)) f(y) dy by direct quadrature.

    ``samples`` holds f on ``grid``; the result is evaluated at ``targets``
    (default: the grid itself).
    """

    values = np.asarray(samples, dtype=np.complex128)
    if values.shape != (grid.size,):
        raise ResolutionError(
            "Grid samples do not match the grid size.",
            expected=grid.size,
            received=list(values.shape),
        )
    where = grid.points if targets is None else np.asarray(targets, dtype=np.float64)
    weighted = grid.weights * values
    out = np.empty(where.shape[0], dtype=np.complex128)

    for start in range(0, where.shape[0], _CHUNK):
        block = where[start : start + _CHUNK]
        distance = m.geodesic_distance(block[:, None, :], grid.points[None, :, :])
        inside = distance < cutoff.support
        kernel = np.zeros(distance.shape, dtype=np.complex128)
        kernel[inside] = kernel_value(m, cutoff, t, distance[inside])
        out[start : start + _CHUNK] = kernel @ weighted
    return out


def default_targets(m: ManifoldModel, count: int = 12, seed: int = 7) -> NDArray[np.float64]:
    """Deterministic pseudo-random evaluation points."""

    rng = np.random.default_rng(seed)
    if isinstance(m, Sphere2):
        z = rng.uniform(-1.0, 1.0, count)
        phi = rng.uniform(0.0, 2 * math.pi, count)
        return np.stack([np.arccos(z), phi], axis=-1)
    if isinstance(m, FlatTorus):
        return rng.uniform(0.0, 1.0, (count, m.dimension)) * np.asarray(m.periods)
    return rng.uniform(0.0, 2 * math.pi, (count, 1))


def _rayleigh(
    m: ManifoldModel,
    cutoff: CutoffProfile,
    t: float,
    level: EigenLevel,
    mode: int,
    targets: NDArray[np.float64],
    budget: int,
    scale: float,
) -> complex:
    grid = dense_grid(m, cutoff, t, level.energy, budget, scale)
    u_grid = level.evaluate(grid.points)[mode]
    u_targets = level.evaluate(targets)[mode]
    image = dense_apply(m, cutoff, t, grid, u_grid, targets)
    return complex(np.vdot(u_targets, image) / np.vdot(u_targets, u_targets))


def dense_multiplier(
    m: ManifoldModel,
    cutoff: CutoffProfile,
    t: float,
    level: EigenLevel,
    *,
    mode: int = 0,
    targets: ArrayLike | None = None,
    budget: int = DEFAULT_DENSE_BUDGET,
    tolerance: float = 1e-8,
) -> complex:
    """Rayleigh quotient <u, U_chi(t) u> / <u, u> on target points, from the dense grid.

    The grid is rebuilt at 1.5x the bandwidth; a disagreement above ``tolerance``
    means the coarse grid is under-resolved.
    """

    points = default_targets(m) if targets is None else np.asarray(targets, dtype=np.float64)
    coarse = _rayleigh(m, cutoff, t, level, mode, points, budget, 1.0)
    fine = _rayleigh(m, cutoff, t, level, mode, points, budget, 1.5)
    disagreement = abs(fine - coarse)
    logger.debug(
        "dense_multiplier_resolved",
        extra={"manifold": m.key, "t": t, "level_index": level.index, "estimate": disagreement},
    )
    if disagreement > tolerance * max(1.0, abs(fine)):
        raise ResolutionError(
            "Dense grid is under-resolved for the kernel oscillation.",
            manifold=m.key,
            t=t,
            level=level.index,
            budget=budget,
            disagreement=disagreement,
        )
    return fine


__all__ = [
    "DEFAULT_DENSE_BUDGET",
    "DenseGrid",
    "cutoff_bandwidth",
    "default_targets",
    "dense_apply",
    "dense_grid",
    "dense_multiplier",
]
