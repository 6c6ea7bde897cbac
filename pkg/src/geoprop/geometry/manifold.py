"""Closed-form rank-1 symmetric manifolds: Circle, FlatTorus and Sphere2.

Points are numpy arrays whose last axis holds chart coordinates:

* ``Circle``: one angle in ``[0, 2*pi)``.
* ``FlatTorus``: one length coordinate per period, each in ``[0, P_i)``.
* ``Sphere2``: colatitude in ``[0, pi]`` and longitude in ``[0, 2*pi)``.

Every radial quantity (metric determinant, polar density, mean curvature) is a
function of the geodesic distance ``r`` only and is defined on ``0 <= r < d``
where ``d`` is the injectivity radius.
"""

from __future__ import annotations

import enum
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import ClassVar

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import gamma

from geoprop.core.errors import GeometryError, ManifoldKeyError

TWO_PI = 2.0 * math.pi


class ManifoldKind(enum.Enum):
    """Supported manifold families."""
    CIRCLE = "circle"
    TORUS = "torus"
    SPHERE2 = "sphere2"


def _wrap(values: NDArray[np.float64], period: float | NDArray[np.float64]) -> NDArray[np.float64]:
    wrapped = np.mod(values, period)
    # np.mod can round tiny negatives up to the period itself
    return np.where(wrapped >= period, 0.0, wrapped)


def _format_length(value: float) -> str:
    short = format(value, "g")
    return short if float(short) == value else repr(value)


class ManifoldModel(ABC):
    """Geometric data of a compact two-point homogeneous manifold."""

    kind: ClassVar[ManifoldKind]

    @property
    @abstractmethod
    def dimension(self) -> int:
        """Manifold dimension n."""

    @property
    @abstractmethod
    def scalar_curvature(self) -> float:
        """Constant scalar curvature R."""

    @property
    @abstractmethod
    def injectivity_radius(self) -> float:
        """Injectivity radius d (positive and finite)."""

    @property
    @abstractmethod
    def total_volume(self) -> float:
        """Riemannian volume of the manifold."""

    @property
    @abstractmethod
    def key(self) -> str:
        """Round-trippable selection key, e.g. ``sphere2:1``."""

    @property
    def coordinate_count(self) -> int:
        return self.dimension

    @property
    def direction_measure(self) -> float:
        """Measure of the unit sphere of directions, |S^(n-1)|."""

        n = self.dimension
        return float(2.0 * math.pi ** (n / 2.0) / gamma(n / 2.0))

    @abstractmethod
    def normalize(self, points: ArrayLike) -> NDArray[np.float64]:
        """Map chart coordinates into the fundamental domain (idempotent)."""

    @abstractmethod
    def geodesic_distance(self, x: ArrayLike, y: ArrayLike) -> NDArray[np.float64]:
        """Length of the minimizing geodesic between normalized points.

        Broadcasts over leading axes of ``x`` and ``y``.
        """

    @abstractmethod
    def _metric_det(self, r: NDArray[np.float64]) -> NDArray[np.float64]: ...

    @abstractmethod
    def _polar_density(self, r: NDArray[np.float64]) -> NDArray[np.float64]: ...

    @abstractmethod
    def _mean_curvature(self, r: NDArray[np.float64]) -> NDArray[np.float64]: ...

    def check_radius(self, r: ArrayLike) -> NDArray[np.float64]:
        """Return ``r`` as an array after rejecting values outside ``[0, d)``."""

        radius = np.asarray(r, dtype=np.float64)
        if np.any(radius < 0.0) or np.any(~np.isfinite(radius)):
            raise GeometryError(
                code="geometry.negative_radius",
                message="Geodesic radius must be finite and non-negative.",
                details={"manifold": self.key},
            )
        if np.any(radius >= self.injectivity_radius):
            raise GeometryError(
                code="geometry.beyond_injectivity_radius",
                message="Geodesic radius must stay below the injectivity radius.",
                details={
                    "manifold": self.key,
                    "injectivity_radius": self.injectivity_radius,
                    "max_radius": float(np.max(radius)),
                },
            )
        return radius

    def normal_metric_det(self, r: ArrayLike) -> NDArray[np.float64]:
        """det(g_ij) in normal coordinates at geodesic distance ``r``."""

        return self._metric_det(self.check_radius(r))

    def polar_volume_density(self, r: ArrayLike) -> NDArray[np.float64]:
        """Density g(r) with dvol = g(r) dr dtheta in geodesic polar coordinates."""

        return self._polar_density(self.check_radius(r))

    def mean_curvature(self, r: ArrayLike) -> NDArray[np.float64]:
        """Mean curvature H(r) = g'(r)/g(r) of the geodesic sphere of radius ``r``."""

        radius = self.check_radius(r)
        if np.any(radius == 0.0) and self.dimension > 1:
            raise GeometryError(
                code="geometry.degenerate_sphere",
                message="Mean curvature is undefined at r = 0.",
                details={"manifold": self.key},
            )
        return self._mean_curvature(radius)


@dataclass(frozen=True, slots=True)
class Circle(ManifoldModel):
    """Circle of the given radius; coordinate is the angle."""

    radius: float = 1.0

    kind: ClassVar[ManifoldKind] = ManifoldKind.CIRCLE

    def __post_init__(self) -> None:
        _require_positive("radius", self.radius)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dimension(self) -> int:
        return 1

    @property
    def scalar_curvature(self) -> float:
        return 0.0

    @property
    def injectivity_radius(self) -> float:
        return math.pi * self.radius

    @property
    def total_volume(self) -> float:
        return TWO_PI * self.radius

    @property
    def key(self) -> str:
        return f"circle:{_format_length(self.radius)}"

    def normalize(self, points: ArrayLike) -> NDArray[np.float64]:
        return _wrap(np.asarray(points, dtype=np.float64), TWO_PI)

    def geodesic_distance(self, x: ArrayLike, y: ArrayLike) -> NDArray[np.float64]:
        delta = np.mod(np.abs(np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64)), TWO_PI)
        angle = np.minimum(delta, TWO_PI - delta)
        return self.radius * angle[..., 0]

    def _metric_det(self, r: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.ones_like(r)

    def _polar_density(self, r: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.ones_like(r)

    def _mean_curvature(self, r: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.zeros_like(r)


@dataclass(frozen=True, slots=True)
class FlatTorus(ManifoldModel):
    """Flat rectangular torus R^n / (P_1 Z x ... x P_n Z)."""

    periods: tuple[float, ...] = (TWO_PI, TWO_PI)

    kind: ClassVar[ManifoldKind] = ManifoldKind.TORUS

    def __post_init__(self) -> None:
        periods = tuple(float(p) for p in self.periods)
        if not periods:
            raise GeometryError(
                code="geometry.empty_torus",
                message="A flat torus needs at least one period.",
            )
        for period in periods:
            _require_positive("period", period)
        object.__setattr__(self, "periods", periods)

    @property
    def dimension(self) -> int:
        return len(self.periods)

    @property
    def scalar_curvature(self) -> float:
        return 0.0

    @property
    def injectivity_radius(self) -> float:
        return min(self.periods) / 2.0

    @property
    def total_volume(self) -> float:
        return float(math.prod(self.periods))

    @property
    def key(self) -> str:
        return "torus:" + ",".join(_format_length(p) for p in self.periods)

    def normalize(self, points: ArrayLike) -> NDArray[np.float64]:
        return _wrap(np.asarray(points, dtype=np.float64), np.asarray(self.periods))

    def geodesic_distance(self, x: ArrayLike, y: ArrayLike) -> NDArray[np.float64]:
        periods = np.asarray(self.periods)
        delta = np.mod(np.abs(np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64)), periods)
        shortest = np.minimum(delta, periods - delta)
        return np.sqrt(np.sum(shortest**2, axis=-1))

    def _metric_det(self, r: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.ones_like(r)

    def _polar_density(self, r: NDArray[np.float64]) -> NDArray[np.float64]:
        return r ** (self.dimension - 1)

    def _mean_curvature(self, r: NDArray[np.float64]) -> NDArray[np.float64]:
        if self.dimension == 1:
            return np.zeros_like(r)
        return (self.dimension - 1) / r


@dataclass(frozen=True, slots=True)
class Sphere2(ManifoldModel):
    """Round two-sphere of the given radius in (colatitude, longitude) coordinates."""

    radius: float = 1.0

    kind: ClassVar[ManifoldKind] = ManifoldKind.SPHERE2

    def __post_init__(self) -> None:
        _require_positive("radius", self.radius)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dimension(self) -> int:
        return 2

    @property
    def scalar_curvature(self) -> float:
        return 2.0 / self.radius**2

    @property
    def injectivity_radius(self) -> float:
        return math.pi * self.radius

    @property
    def total_volume(self) -> float:
        return 4.0 * math.pi * self.radius**2

    @property
    def key(self) -> str:
        return f"sphere2:{_format_length(self.radius)}"

    def normalize(self, points: ArrayLike) -> NDArray[np.float64]:
        coords = np.asarray(points, dtype=np.float64)
        theta = coords[..., 0]
        phi = coords[..., 1]
        folded = np.mod(theta, TWO_PI)
        flip = folded > math.pi
        theta = np.where(flip, TWO_PI - folded, np.where((theta >= 0) & (theta <= math.pi), theta, folded))
        phi = np.where(flip, phi + math.pi, phi)
        return np.stack([theta, _wrap(phi, TWO_PI)], axis=-1)

    def to_cartesian(self, points: ArrayLike) -> NDArray[np.float64]:
        """Unit vectors in R^3 for (colatitude, longitude) points."""

        coords = np.asarray(points, dtype=np.float64)
        theta = coords[..., 0]
        phi = coords[..., 1]
        sin_theta = np.sin(theta)
        return np.stack(
            [sin_theta * np.cos(phi), sin_theta * np.sin(phi), np.cos(theta)], axis=-1
        )

    def geodesic_distance(self, x: ArrayLike, y: ArrayLike) -> NDArray[np.float64]:
        u = self.to_cartesian(x)
        v = self.to_cartesian(y)
        u, v = np.broadcast_arrays(u, v)
        # atan2 keeps full precision near 0 and near the antipode
        cross = np.linalg.norm(np.cross(u, v), axis=-1)
        dot = np.sum(u * v, axis=-1)
        return self.radius * np.arctan2(cross, dot)

    def _metric_det(self, r: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.sinc(r / (math.pi * self.radius)) ** 2

    def _polar_density(self, r: NDArray[np.float64]) -> NDArray[np.float64]:
        return self.radius * np.sin(r / self.radius)

    def _mean_curvature(self, r: NDArray[np.float64]) -> NDArray[np.float64]:
        return 1.0 / (self.radius * np.tan(r / self.radius))


def _require_positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise GeometryError(
            code="geometry.invalid_length",
            message=f"Manifold {name} must be a positive finite length.",
            details={name: value},
        )


def _parse_length(token: str) -> float:
    """Parse ``1.5``, ``pi``, ``2pi`` or ``0.5pi``."""

    token = token.strip().lower()
    if token.endswith("pi"):
        factor = token[:-2] or "1"
        return float(factor) * math.pi
    return float(token)


def parse_manifold(key: str) -> ManifoldModel:
    """Resolve ``circle:R``, ``torus:P1,P2,...`` or ``sphere2:R`` into a model."""

    name, sep, params = key.strip().partition(":")
    try:
        kind = ManifoldKind(name.lower())
    except ValueError as exc:
        raise ManifoldKeyError(key, f"unknown manifold {name!r}") from exc

    if not sep or not params:
        raise ManifoldKeyError(key, "missing numeric parameters")

    try:
        values = [_parse_length(token) for token in params.split(",")]
    except ValueError as exc:
        raise ManifoldKeyError(key, "parameters must be numbers") from exc

    if kind is not ManifoldKind.TORUS and len(values) != 1:
        raise ManifoldKeyError(key, f"{kind.value} takes exactly one radius")

    try:
        if kind is ManifoldKind.CIRCLE:
            return Circle(values[0])
        if kind is ManifoldKind.SPHERE2:
            return Sphere2(values[0])
        return FlatTorus(tuple(values))
    except GeometryError as exc:
        raise ManifoldKeyError(key, exc.message) from exc


__all__ = [
    "Circle",
    "FlatTorus",
    "ManifoldKind",
    "ManifoldModel",
    "Sphere2",
    "parse_manifold",
]
