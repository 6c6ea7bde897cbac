"""Analytic Laplace eigen-data: levels, real orthonormal bases and zonal profiles."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import gamma, jv, roots_legendre

from geoprop.geometry import Circle, FlatTorus, ManifoldModel, Sphere2

from .legendre import legendre_polynomials, normalized_associated_legendre

Mode = tuple[int, ...]

_ENERGY_SLACK = 1e-12


@dataclass(frozen=True, slots=True)
class EigenLevel:
    """One eigenvalue of -Laplacian with its real orthonormal eigenfunctions.

    ``modes`` labels each basis function; the label layout depends on the
    manifold:

    * Circle: ``(k, 0)`` for cos(k theta) and ``(k, 1)`` for sin(k theta).
    * FlatTorus: ``(m_1, ..., m_n, 0)`` for cos and ``(m_1, ..., m_n, 1)`` for sin,
      with the first nonzero m_i positive.
    * Sphere2: ``(l, m)`` for m = -l..l; negative m uses sin(|m| phi).
    """

    manifold: ManifoldModel
    index: int
    energy: float
    modes: tuple[Mode, ...]

    @property
    def multiplicity(self) -> int:
        return len(self.modes)

    @property
    def wavenumber(self) -> float:
        return math.sqrt(self.energy)

    def evaluate(self, points: ArrayLike) -> NDArray[np.float64]:
        """Eigenfunction values with shape ``(multiplicity, *points.shape[:-1])``."""

        return evaluate_modes(self.manifold, self.modes, points)


@dataclass(frozen=True)
class EigenBasis:
    """All levels of a manifold with energy at most ``energy_max``, in order."""

    manifold: ManifoldModel
    energy_max: float
    levels: tuple[EigenLevel, ...]

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        counts = [level.multiplicity for level in self.levels]
        return tuple(int(v) for v in np.concatenate([[0], np.cumsum(counts)]))

    @property
    def size(self) -> int:
        return self.offsets[-1]

    @cached_property
    def level_of_coefficient(self) -> NDArray[np.int64]:
        return np.repeat(
            np.arange(len(self.levels)), [level.multiplicity for level in self.levels]
        )

    @cached_property
    def energies(self) -> NDArray[np.float64]:
        """Per-coefficient eigenvalue."""

        level_energies = np.array([level.energy for level in self.levels])
        return level_energies[self.level_of_coefficient]

    @property
    def modes(self) -> tuple[Mode, ...]:
        return tuple(mode for level in self.levels for mode in level.modes)

    def coefficient_index(self, level: int, mode: int) -> int:
        return self.offsets[level] + mode

    def evaluate(self, points: ArrayLike) -> NDArray[np.float64]:
        """Every basis function at ``points``, shape ``(size, *points.shape[:-1])``."""

        return evaluate_modes(self.manifold, self.modes, points)


def _within(energy: float, energy_max: float) -> bool:
    return energy <= energy_max * (1.0 + _ENERGY_SLACK) + _ENERGY_SLACK


def _circle_levels(m: Circle, energy_max: float) -> list[EigenLevel]:
    levels: list[EigenLevel] = []
    k = 0
    while _within((k / m.radius) ** 2, energy_max):
        modes: tuple[Mode, ...] = ((0, 0),) if k == 0 else ((k, 0), (k, 1))
        levels.append(EigenLevel(m, k, (k / m.radius) ** 2, modes))
        k += 1
    return levels


def _sphere_levels(m: Sphere2, energy_max: float) -> list[EigenLevel]:
    levels: list[EigenLevel] = []
    l = 0
    while _within(l * (l + 1) / m.radius**2, energy_max):
        modes = tuple((l, order) for order in range(-l, l + 1))
        levels.append(EigenLevel(m, l, l * (l + 1) / m.radius**2, modes))
        l += 1
    return levels


def _canonical(vector: tuple[int, ...]) -> bool:
    for component in vector:
        if component != 0:
            return component > 0
    return True


def _torus_levels(m: FlatTorus, energy_max: float) -> list[EigenLevel]:
    bounds = [int(math.floor(p * math.sqrt(max(energy_max, 0.0)) / (2 * math.pi))) + 1 for p in m.periods]
    grouped: dict[float, list[Mode]] = {}
    exact: dict[float, float] = {}
    for vector in itertools.product(*(range(-b, b + 1) for b in bounds)):
        if not _canonical(vector):
            continue
        energy = sum((2 * math.pi * k / p) ** 2 for k, p in zip(vector, m.periods))
        if not _within(energy, energy_max):
            continue
        key = round(energy, 9)
        exact.setdefault(key, energy)
        if all(k == 0 for k in vector):
            grouped.setdefault(key, []).append((*vector, 0))
        else:
            grouped.setdefault(key, []).extend([(*vector, 0), (*vector, 1)])

    levels: list[EigenLevel] = []
    for index, key in enumerate(sorted(grouped)):
        levels.append(EigenLevel(m, index, exact[key], tuple(sorted(grouped[key]))))
    return levels


@lru_cache(maxsize=128)
def eigenbasis(m: ManifoldModel, energy_max: float) -> EigenBasis:
    """Complete eigenbasis of ``m`` up to ``energy_max`` (cached per manifold)."""

    energy_max = float(energy_max)
    if energy_max < 0:
        energy_max = 0.0
    if isinstance(m, Circle):
        levels = _circle_levels(m, energy_max)
    elif isinstance(m, Sphere2):
        levels = _sphere_levels(m, energy_max)
    elif isinstance(m, FlatTorus):
        levels = _torus_levels(m, energy_max)
    else:  # pragma: no cover - closed set of manifolds
        raise TypeError(f"Unsupported manifold {m!r}")
    return EigenBasis(m, energy_max, tuple(levels))


def eigenlevels(m: ManifoldModel, energy_max: float) -> list[EigenLevel]:
    """Every eigenlevel of ``m`` with eigenvalue at most ``energy_max``."""

    return list(eigenbasis(m, energy_max).levels)


def evaluate_modes(m: ManifoldModel, modes: tuple[Mode, ...], points: ArrayLike) -> NDArray[np.float64]:
    coords = np.asarray(points, dtype=np.float64)
    shape = coords.shape[:-1]
    out = np.empty((len(modes), *shape), dtype=np.float64)

    if isinstance(m, Circle):
        theta = coords[..., 0]
        for row, (k, parity) in enumerate(modes):
            if k == 0:
                out[row] = 1.0 / math.sqrt(m.total_volume)
            else:
                wave = np.sin(k * theta) if parity else np.cos(k * theta)
                out[row] = wave / math.sqrt(math.pi * m.radius)
        return out

    if isinstance(m, FlatTorus):
        periods = np.asarray(m.periods)
        for row, mode in enumerate(modes):
            vector, parity = np.asarray(mode[:-1]), mode[-1]
            if not vector.any():
                out[row] = 1.0 / math.sqrt(m.total_volume)
                continue
            phase = coords @ (2 * math.pi * vector / periods)
            wave = np.sin(phase) if parity else np.cos(phase)
            out[row] = math.sqrt(2.0 / m.total_volume) * wave
        return out

    if isinstance(m, Sphere2):
        theta = coords[..., 0]
        phi = coords[..., 1]
        degree = max((mode[0] for mode in modes), default=0)
        q = normalized_associated_legendre(degree, theta)
        for row, (l, order) in enumerate(modes):
            if order == 0:
                value = q[l, 0]
            elif order > 0:
                value = math.sqrt(2.0) * q[l, order] * np.cos(order * phi)
            else:
                value = math.sqrt(2.0) * q[l, -order] * np.sin(-order * phi)
            out[row] = value / m.radius
        return out

    raise TypeError(f"Unsupported manifold {m!r}")  # pragma: no cover


def zonal_profile(m: ManifoldModel, level: EigenLevel, r: ArrayLike) -> NDArray[np.float64]:
    """Spherical function of ``level`` as a function of distance, equal to 1 at r = 0.

    A distance-only kernel acts on the whole level as multiplication by its
    integral against this profile.
    """

    radius = np.asarray(r, dtype=np.float64)
    k = level.wavenumber

    if isinstance(m, Circle) or (isinstance(m, FlatTorus) and m.dimension == 1):
        return np.cos(k * radius)

    if isinstance(m, Sphere2):
        return legendre_polynomials(level.index, np.cos(radius / m.radius))[level.index]

    if isinstance(m, FlatTorus):
        order = m.dimension / 2.0 - 1.0
        kr = k * radius
        safe = np.where(kr > 0, kr, 1.0)
        value = gamma(m.dimension / 2.0) * (2.0 / safe) ** order * jv(order, safe)
        return np.where(kr > 0, value, 1.0)

    raise TypeError(f"Unsupported manifold {m!r}")  # pragma: no cover


def spectral_grid(m: ManifoldModel, energy_max: float) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Points and weights integrating products of two functions in the basis exactly."""

    if isinstance(m, Circle):
        k_max = int(math.floor(m.radius * math.sqrt(energy_max) + _ENERGY_SLACK))
        count = 2 * k_max + 2
        theta = 2 * math.pi * np.arange(count) / count
        weights = np.full(count, m.total_volume / count)
        return theta[:, None], weights

    if isinstance(m, FlatTorus):
        axes = []
        for period in m.periods:
            m_max = int(math.floor(period * math.sqrt(energy_max) / (2 * math.pi) + _ENERGY_SLACK))
            count = 2 * m_max + 2
            axes.append(period * np.arange(count) / count)
        mesh = np.meshgrid(*axes, indexing="ij")
        points = np.stack([axis.ravel() for axis in mesh], axis=-1)
        weights = np.full(points.shape[0], m.total_volume / points.shape[0])
        return points, weights

    if isinstance(m, Sphere2):
        basis = eigenbasis(m, energy_max)
        degree = len(basis.levels) - 1
        x, w = roots_legendre(degree + 2)
        n_phi = 2 * degree + 2
        phi = 2 * math.pi * np.arange(n_phi) / n_phi
        theta_grid, phi_grid = np.meshgrid(np.arccos(x), phi, indexing="ij")
        points = np.stack([theta_grid.ravel(), phi_grid.ravel()], axis=-1)
        weights = np.repeat(w, n_phi) * (2 * math.pi / n_phi) * m.radius**2
        return points, weights

    raise TypeError(f"Unsupported manifold {m!r}")  # pragma: no cover


def orthonormality_defect(m: ManifoldModel, energy_max: float) -> float:
    """max |<u_a, u_b> - delta_ab| over the basis, by exact quadrature."""

    basis = eigenbasis(m, energy_max)
    points, weights = spectral_grid(m, energy_max)
    values = basis.evaluate(points)
    gram = (values * weights) @ values.T
    return float(np.max(np.abs(gram - np.eye(basis.size))))


__all__ = [
    "EigenBasis",
    "EigenLevel",
    "eigenbasis",
    "eigenlevels",
    "evaluate_modes",
    "orthonormality_defect",
    "spectral_grid",
    "zonal_profile",
]
