"""Eigenspace multipliers of the short-time propagator by radial quadrature.

On a two-point homogeneous manifold a distance-only kernel acts on each
Laplace eigenspace as a scalar

    lambda_j(t) = |S^(n-1)| * int_0^delta K(t, r) phi_j(r) g(r) dr,

where phi_j is the zonal profile of the level (equal to 1 at r = 0) and g the
polar volume density. The integral is evaluated with composite Gauss-Legendre
panels of uniform width sized to the local phase wavelength. Doubling the
panel count gives two refinement levels; their difference is the error
estimate and their Richardson combination the returned value.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Protocol

import numpy as np
from numpy.typing import NDArray
from scipy.special import roots_legendre

from geoprop.core.errors import DomainError, QuadratureConvergenceError, UsageError
from geoprop.geometry import ManifoldModel, parse_manifold
from geoprop.kernel import CutoffProfile, kernel_value
from geoprop.spectral import EigenLevel, SpectralState, eigenbasis, zonal_profile

logger = logging.getLogger(__name__)

MIN_BUDGET = 8
# the cutoff transition is flat to all orders at both ends and needs
# several panels even when the phase is slow
MIN_ZONE_PANELS = 8


@lru_cache(maxsize=32)
def _gauss_legendre(order: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    nodes, weights = roots_legendre(order)
    return nodes, weights


@lru_cache(maxsize=32)
def _widest_gap(order: int) -> float:
    """Largest node gap of an ``order``-point panel of unit width, across panel edges included."""

    x, _ = _gauss_legendre(order)
    return float(max(np.max(np.diff(x)) / 2.0, 1.0 + x[0]))


def composite_gauss_legendre(
    edges: NDArray[np.float64], order: int
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Nodes and weights of an ``order``-point Gauss-Legendre rule on every panel."""

    x, w = _gauss_legendre(order)
    left = edges[:-1, None]
    half = 0.5 * np.diff(edges)[:, None]
    nodes = left + half * (x + 1.0)
    weights = half * w
    return nodes.ravel(), weights.ravel()


def _zone_edges(start: float, stop: float, width: float, refinement: int) -> NDArray[np.float64]:
    panels = max(1, math.ceil((stop - start) / width)) * 2**refinement
    return np.linspace(start, stop, panels + 1)


@dataclass(frozen=True, slots=True)
class RadialRule:
    """Composite Gauss-Legendre rule on [0, support] (or [0, upper])."""

    nodes: NDArray[np.float64]
    weights: NDArray[np.float64]
    budget: int
    panels: tuple[int, ...]

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    @classmethod
    def build(
        cls,
        cutoff: CutoffProfile,
        t: float,
        wavenumber: float = 0.0,
        *,
        budget: int = 16,
        refinement: int = 0,
        upper: float | None = None,
    ) -> RadialRule:
        """Uniform panels with ``budget`` nodes each and no node gap wider than
        wavelength / budget, where the local wavelength is 2 pi / (r/t + k).

        Each zone uses the wavelength at its outer edge: the plateau zone at the
        plateau radius, the transition zone at the support radius.
        """

        if budget < MIN_BUDGET:
            raise DomainError(
                code="quadrature.budget",
                message=f"Oscillation budget must be at least {MIN_BUDGET}.",
                details={"budget": budget},
            )
        if not t > 0:
            raise DomainError(
                code="kernel.nonpositive_time",
                message="Kernel time must be positive.",
                details={"t": t},
            )

        bounds = [0.0, cutoff.plateau, cutoff.support]
        if upper is not None and upper > cutoff.support:
            bounds.append(upper)

        edges_per_zone = []
        for start, stop in zip(bounds[:-1], bounds[1:]):
            wavelength = 2 * math.pi / (stop / t + wavenumber)
            spacing = wavelength / budget
            width = min(spacing / _widest_gap(budget), (stop - start) / MIN_ZONE_PANELS)
            edges_per_zone.append(_zone_edges(start, stop, width, refinement))

        nodes_parts, weight_parts = zip(
            *(composite_gauss_legendre(edges, budget) for edges in edges_per_zone)
        )
        return cls(
            nodes=np.concatenate(nodes_parts),
            weights=np.concatenate(weight_parts),
            budget=budget,
            panels=tuple(len(edges) - 1 for edges in edges_per_zone),
        )


def _integrate(
    m: ManifoldModel,
    cutoff: CutoffProfile,
    t: float,
    levels: list[EigenLevel],
    rule: RadialRule,
) -> NDArray[np.complex128]:
    kernel = kernel_value(m, cutoff, t, rule.nodes)
    weighted = m.direction_measure * rule.weights * kernel * m.polar_volume_density(rule.nodes)
    profiles = np.stack([zonal_profile(m, level, rule.nodes) for level in levels])
    return profiles @ weighted


def multiplier_values(
    m: ManifoldModel,
    cutoff: CutoffProfile,
    t: float,
    levels: list[EigenLevel],
    *,
    budget: int = 16,
    tolerance: float = 1e-10,
    max_refinements: int = 6,
    upper: float | None = None,
) -> tuple[NDArray[np.complex128], list[dict[str, Any]]]:
    """Multipliers of ``levels`` plus the refinement trace.

    The error estimate is the largest change between two consecutive
    refinement levels; it must fall below ``tolerance * max(1, |lambda|)``.
    The returned values are Richardson-extrapolated from those two levels
    for a rule of order 2 * budget.
    """

    if not levels:
        return np.zeros(0, dtype=np.complex128), []
    if upper is not None and upper >= m.injectivity_radius:
        raise DomainError(
            code="quadrature.upper",
            message="Integration range must stay below the injectivity radius.",
            details={"upper": upper, "injectivity_radius": m.injectivity_radius},
        )

    wavenumber = max(level.wavenumber for level in levels)
    trace: list[dict[str, Any]] = []
    previous: NDArray[np.complex128] | None = None

    for refinement in range(max_refinements + 1):
        rule = RadialRule.build(
            cutoff, t, wavenumber, budget=budget, refinement=refinement, upper=upper
        )
        values = _integrate(m, cutoff, t, levels, rule)
        entry: dict[str, Any] = {"refinement": refinement, "nodes": rule.size}
        if previous is not None:
            scale = np.maximum(1.0, np.abs(values))
            estimate = float(np.max(np.abs(values - previous) / scale))
            entry["estimate"] = estimate
            trace.append(entry)
            logger.debug(
                "quadrature_refined",
                extra={"manifold": m.key, "t": t, **entry},
            )
            if estimate <= tolerance:
                return values + (values - previous) / (2.0 ** (2 * budget) - 1.0), trace
        else:
            trace.append(entry)
        previous = values

    raise QuadratureConvergenceError(
        f"Radial quadrature did not reach tolerance {tolerance} on {m.key} at t={t}",
        trace,
    )


def multiplier(
    m: ManifoldModel,
    cutoff: CutoffProfile,
    t: float,
    level: EigenLevel,
    *,
    budget: int = 16,
    tolerance: float = 1e-10,
    upper: float | None = None,
) -> complex:
    """lambda_j(t): the scalar by which U_chi(t) acts on ``level``."""

    values, _ = multiplier_values(
        m, cutoff, t, [level], budget=budget, tolerance=tolerance, upper=upper
    )
    return complex(values[0])


def _repeated_power(values: NDArray[np.complex128], exponent: int) -> NDArray[np.complex128]:
    result = np.ones_like(values)
    base = values.copy()
    while exponent:
        if exponent & 1:
            result = result * base
        base = base * base
        exponent >>= 1
    return result


@dataclass(frozen=True, eq=False)
class MultiplierTable:
    """Diagonal form of U_chi(t)^steps on the levels with E_j <= energy_max."""

    manifold: ManifoldModel
    cutoff: CutoffProfile
    t: float
    energy_max: float
    budget: int
    energies: NDArray[np.float64]
    values: NDArray[np.complex128]
    steps: int = 1
    trace: list[dict[str, Any]] = field(default_factory=list)

    def power(self, exponent: int) -> MultiplierTable:
        """Table of the ``exponent``-fold product, by repeated squaring."""

        if exponent < 1:
            raise DomainError(
                code="multipliers.exponent",
                message="Slice count must be at least 1.",
                details={"exponent": exponent},
            )
        return MultiplierTable(
            manifold=self.manifold,
            cutoff=self.cutoff,
            t=self.t,
            energy_max=self.energy_max,
            budget=self.budget,
            energies=self.energies,
            values=_repeated_power(self.values, exponent),
            steps=self.steps * exponent,
            trace=self.trace,
        )

    def coefficient_multipliers(self, state: SpectralState) -> NDArray[np.complex128]:
        levels = len(state.basis.levels)
        if state.manifold != self.manifold or levels > self.values.size:
            raise UsageError(
                code="multipliers.coverage",
                message="Multiplier table does not cover the state's eigenbasis.",
                details={
                    "table": {"manifold": self.manifold.key, "E_max": self.energy_max},
                    "state": {"manifold": state.manifold.key, "E_max": state.energy_max},
                },
            )
        level_energies = np.array([level.energy for level in state.basis.levels])
        if not np.allclose(level_energies, self.energies[:levels]):
            raise UsageError(
                code="multipliers.levels",
                message="Multiplier table levels do not match the state's levels.",
            )
        return self.values[state.basis.level_of_coefficient]

    def apply(self, state: SpectralState) -> SpectralState:
        return state.with_coefficients(state.coefficients * self.coefficient_multipliers(state))

    def operator_norm(self, energy: float | None = None) -> float:
        """max |lambda_j| over levels with E_j <= energy (all levels by default)."""

        mask = np.ones(self.values.size, dtype=bool)
        if energy is not None:
            mask = self.energies <= energy * (1.0 + 1e-12) + 1e-12
        if not mask.any():
            return 0.0
        return float(np.max(np.abs(self.values[mask])))

    def unitarity_defect(self, energy: float | None = None) -> float:
        mask = np.ones(self.values.size, dtype=bool)
        if energy is not None:
            mask = self.energies <= energy * (1.0 + 1e-12) + 1e-12
        if not mask.any():
            return 0.0
        return float(np.max(np.abs(np.abs(self.values[mask]) - 1.0)))

    def to_dict(self) -> dict[str, Any]:
        return {
            "manifold": self.manifold.key,
            "cutoff": self.cutoff.to_dict(),
            "t": self.t,
            "energy_max": self.energy_max,
            "budget": self.budget,
            "steps": self.steps,
            "energies": [float(e) for e in self.energies],
            "values": [[float(v.real), float(v.imag)] for v in self.values],
        }

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> MultiplierTable:
        values = np.array([complex(re, im) for re, im in payload["values"]], dtype=np.complex128)
        return cls(
            manifold=parse_manifold(payload["manifold"]),
            cutoff=CutoffProfile(**payload["cutoff"]),
            t=float(payload["t"]),
            energy_max=float(payload["energy_max"]),
            budget=int(payload["budget"]),
            energies=np.asarray(payload["energies"], dtype=np.float64),
            values=values,
            steps=int(payload.get("steps", 1)),
        )


def multiplier_table(
    m: ManifoldModel,
    cutoff: CutoffProfile,
    t: float,
    energy_max: float,
    *,
    budget: int = 16,
    tolerance: float = 1e-10,
    max_refinements: int = 6,
) -> MultiplierTable:
    """Multipliers of every level with E_j <= energy_max at time ``t``."""

    levels = list(eigenbasis(m, energy_max).levels)
    values, trace = multiplier_values(
        m,
        cutoff,
        t,
        levels,
        budget=budget,
        tolerance=tolerance,
        max_refinements=max_refinements,
    )
    logger.debug(
        "multiplier_table_built",
        extra={
            "manifold": m.key,
            "t": t,
            "levels": len(levels),
            "nodes": trace[-1]["nodes"] if trace else 0,
        },
    )
    return MultiplierTable(
        manifold=m,
        cutoff=cutoff,
        t=t,
        energy_max=float(energy_max),
        budget=budget,
        energies=np.array([level.energy for level in levels]),
        values=values,
        trace=trace,
    )


def operator_norm_estimate(
    m: ManifoldModel,
    cutoff: CutoffProfile,
    t: float,
    energy: float,
    *,
    budget: int = 16,
    tolerance: float = 1e-10,
) -> float:
    """||U_chi(t) rho(E)|| = max_{E_j <= E} |lambda_j(t)|."""

    return multiplier_table(m, cutoff, t, energy, budget=budget, tolerance=tolerance).operator_norm()


class TableStore(Protocol):
    def get(self, key: str) -> MultiplierTable | None: ...

    def put(self, key: str, table: MultiplierTable) -> None: ...


def table_key(
    m: ManifoldModel,
    cutoff: CutoffProfile,
    t: float,
    energy_max: float,
    budget: int,
    tolerance: float,
) -> str:
    """Deterministic identity of a multiplier table."""

    return "|".join(
        [
            m.key,
            repr(cutoff.plateau),
            repr(cutoff.support),
            repr(cutoff.sharpness),
            repr(float(t)),
            repr(float(energy_max)),
            str(budget),
            repr(float(tolerance)),
        ]
    )


@dataclass(slots=True)
class MultiplierTableBuilder:
    """Builds multiplier tables with fixed quadrature settings and an optional store."""

    budget: int = 16
    tolerance: float = 1e-10
    max_refinements: int = 6
    store: TableStore | None = None

    def build(
        self, m: ManifoldModel, cutoff: CutoffProfile, t: float, energy_max: float
    ) -> MultiplierTable:
        key = table_key(m, cutoff, t, energy_max, self.budget, self.tolerance)
        if self.store is not None:
            cached = self.store.get(key)
            if cached is not None:
                return cached

        table = multiplier_table(
            m,
            cutoff,
            t,
            energy_max,
            budget=self.budget,
            tolerance=self.tolerance,
            max_refinements=self.max_refinements,
        )
        if self.store is not None:
            self.store.put(key, table)
        return table


__all__ = [
    "MultiplierTable",
    "MultiplierTableBuilder",
    "RadialRule",
    "TableStore",
    "composite_gauss_legendre",
    "multiplier",
    "multiplier_table",
    "multiplier_values",
    "operator_norm_estimate",
    "table_key",
]
