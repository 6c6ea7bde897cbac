"""Functions on a manifold as coefficient vectors in the truncated eigenbasis."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from geoprop.core.errors import LevelResolutionError, UsageError
from geoprop.geometry import ManifoldModel, parse_manifold

from .basis import EigenBasis, eigenbasis


@dataclass(frozen=True, eq=False)
class SpectralState:
    """Complex coefficients over every basis function with energy <= ``basis.energy_max``."""

    basis: EigenBasis
    coefficients: NDArray[np.complex128]

    def __post_init__(self) -> None:
        coefficients = np.array(self.coefficients, dtype=np.complex128)
        if coefficients.shape != (self.basis.size,):
            raise UsageError(
                code="state.shape",
                message="Coefficient vector does not match the eigenbasis size.",
                details={"expected": self.basis.size, "received": list(coefficients.shape)},
            )
        coefficients.setflags(write=False)
        object.__setattr__(self, "coefficients", coefficients)

    @property
    def manifold(self) -> ManifoldModel:
        return self.basis.manifold

    @property
    def energy_max(self) -> float:
        return self.basis.energy_max

    @classmethod
    def zeros(cls, m: ManifoldModel, energy_max: float) -> SpectralState:
        basis = eigenbasis(m, energy_max)
        return cls(basis, np.zeros(basis.size, dtype=np.complex128))

    @classmethod
    def from_terms(
        cls,
        m: ManifoldModel,
        energy_max: float,
        terms: Iterable[tuple[int, int, complex]],
    ) -> SpectralState:
        """Build a state from ``(level, mode, amplitude)`` triples."""

        basis = eigenbasis(m, energy_max)
        coefficients = np.zeros(basis.size, dtype=np.complex128)
        for level, mode, amplitude in terms:
            if not 0 <= level < len(basis.levels):
                raise LevelResolutionError(
                    f"level {level} is not below energy {energy_max} on {m.key}",
                    level=level,
                    available=len(basis.levels),
                )
            multiplicity = basis.levels[level].multiplicity
            if not 0 <= mode < multiplicity:
                raise LevelResolutionError(
                    f"mode {mode} does not exist in level {level} (multiplicity {multiplicity})",
                    level=level,
                    mode=mode,
                )
            coefficients[basis.coefficient_index(level, mode)] += complex(amplitude)
        return cls(basis, coefficients)

    @classmethod
    def random(
        cls,
        m: ManifoldModel,
        energy_max: float,
        seed: int | np.random.Generator = 0,
        *,
        levels: int | None = None,
    ) -> SpectralState:
        """Seeded random unit-norm state supported on the first ``levels`` levels."""

        rng = np.random.default_rng(seed)
        basis = eigenbasis(m, energy_max)
        coefficients = rng.standard_normal(basis.size) + 1j * rng.standard_normal(basis.size)
        if levels is not None:
            coefficients[basis.level_of_coefficient >= levels] = 0.0
        norm = np.linalg.norm(coefficients)
        return cls(basis, coefficients / norm if norm > 0 else coefficients)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def normalized(self) -> SpectralState:
        norm = self.norm()
        if norm == 0:
            raise UsageError(code="state.zero", message="Cannot normalize the zero state.")
        return SpectralState(self.basis, self.coefficients / norm)

    def with_coefficients(self, coefficients: ArrayLike) -> SpectralState:
        return SpectralState(self.basis, np.asarray(coefficients, dtype=np.complex128))

    def evaluate(self, points: ArrayLike) -> NDArray[np.complex128]:
        """Pointwise values sum_j c_j u_j(x)."""

        return np.tensordot(self.coefficients, self.basis.evaluate(points), axes=1)

    def to_payload(self) -> dict[str, Any]:
        """JSON-ready form ``{manifold, E_max, coefficients: [[j, m, re, im], ...]}``."""

        rows = []
        for index, value in enumerate(self.coefficients):
            if value == 0:
                continue
            level = int(self.basis.level_of_coefficient[index])
            rows.append([level, index - self.basis.offsets[level], value.real, value.imag])
        return {
            "manifold": self.manifold.key,
            "E_max": self.energy_max,
            "coefficients": rows,
        }

    @classmethod
    def from_payload(cls, payload: dict[str, Any]) -> SpectralState:
        """Inverse of ``to_payload``; also accepts ``SpectralStatePayload.model_dump()``."""

        m = parse_manifold(payload["manifold"])
        terms = [
            (int(level), int(mode), complex(re, im))
            for level, mode, re, im in payload["coefficients"]
        ]
        return cls.from_terms(m, float(payload["E_max"]), terms)


def _same_space(f: SpectralState, g: SpectralState) -> None:
    if f.basis != g.basis:
        raise UsageError(
            code="state.mismatch",
            message="States live on different manifolds or energy cutoffs.",
            details={
                "left": {"manifold": f.manifold.key, "E_max": f.energy_max},
                "right": {"manifold": g.manifold.key, "E_max": g.energy_max},
            },
        )


def project(f: SpectralState, energy: float) -> SpectralState:
    """Spectral projector rho(E): drop every coefficient with E_j > E."""

    if energy < 0:
        raise UsageError(
            code="state.negative_energy",
            message="Projector energy must be non-negative.",
            details={"energy": energy},
        )
    keep = f.basis.energies <= energy * (1.0 + 1e-12) + 1e-12
    return f.with_coefficients(np.where(keep, f.coefficients, 0.0))


def propagator_phases(
    basis: EigenBasis, t: float, *, curvature_term: bool = True
) -> NDArray[np.complex128]:
    """Per-coefficient exp(-i t (E_j + R/6) / 2); the R/6 shift is dropped on request."""

    shift = basis.manifold.scalar_curvature / 6.0 if curvature_term else 0.0
    return np.exp(-0.5j * t * (basis.energies + shift))


def exact_propagate(
    m: ManifoldModel,
    t: float,
    f: SpectralState,
    *,
    curvature_term: bool = True,
) -> SpectralState:
    """exp(i t (Laplacian - R/6) / 2) applied exactly in the eigenbasis."""

    if f.manifold != m:
        raise UsageError(
            code="state.manifold",
            message="State does not live on the requested manifold.",
            details={"manifold": m.key, "state": f.manifold.key},
        )
    return f.with_coefficients(
        f.coefficients * propagator_phases(f.basis, t, curvature_term=curvature_term)
    )


def l2_error(f: SpectralState, g: SpectralState) -> float:
    """||f - g|| in L^2, computed from coefficients."""

    _same_space(f, g)
    return float(np.linalg.norm(f.coefficients - g.coefficients))


def sobolev_norm(f: SpectralState, k: float) -> float:
    """||(-Laplacian + 1)^(k/2) f||; ``k`` may be fractional."""

    weights = (f.basis.energies + 1.0) ** (k / 2.0)
    return float(np.linalg.norm(weights * f.coefficients))


__all__ = [
    "SpectralState",
    "exact_propagate",
    "l2_error",
    "project",
    "propagator_phases",
    "sobolev_norm",
]
