"""Time-slicing products {U_chi(t/N)}^N rho(E) and their distance to the exact group."""

from __future__ import annotations

import enum
import logging
import math
import time
from collections.abc import Sequence
from dataclasses import dataclass, field

from geoprop.core.errors import DomainError
from geoprop.geometry import ManifoldModel
from geoprop.kernel import CutoffProfile
from geoprop.quadrature import MultiplierTable, MultiplierTableBuilder
from geoprop.spectral import SpectralState, exact_propagate, l2_error, project

from .rates import RateFit, fit_rate

logger = logging.getLogger(__name__)


class ProjectorPolicy(enum.Enum):
    """How the spectral cutoff E follows the slice count N."""
    FIXED_E = "fixed"
    RHO_N = "rho-n"
    RHO_N_POWER = "rho-n-power"


def alpha(n: int) -> float:
    """Sobolev exponent 2 + floor((n + 2) / 2) / 2 of the single-step estimate."""

    return 2.0 + 0.5 * math.floor((n + 2) / 2)


@dataclass(frozen=True, slots=True)
class SlicingPlan:
    t: float
    slices: int
    energy: float | None = None
    policy: ProjectorPolicy = ProjectorPolicy.FIXED_E
    epsilon: float = 0.1

    def __post_init__(self) -> None:
        if self.slices < 1:
            raise DomainError(
                code="slicing.slices",
                message="Slice count must be at least 1.",
                details={"slices": self.slices},
            )
        if not self.t > 0:
            raise DomainError(
                code="slicing.time",
                message="Slicing time must be positive.",
                details={"t": self.t},
            )
        if self.policy is ProjectorPolicy.FIXED_E and (self.energy is None or self.energy < 0):
            raise DomainError(
                code="slicing.energy",
                message="A fixed projector needs a non-negative energy.",
                details={"energy": self.energy},
            )
        if self.policy is ProjectorPolicy.RHO_N_POWER and not self.epsilon > 0:
            raise DomainError(
                code="slicing.epsilon",
                message="The rho(N^(1/alpha - eps)) policy needs eps > 0.",
                details={"epsilon": self.epsilon},
            )

    @property
    def step(self) -> float:
        return self.t / self.slices

    def effective_energy(self, n: int) -> float:
        if self.policy is ProjectorPolicy.RHO_N:
            return float(self.slices)
        if self.policy is ProjectorPolicy.RHO_N_POWER:
            return float(self.slices ** (1.0 / alpha(n) - self.epsilon))
        assert self.energy is not None
        return float(self.energy)


def _builder(builder: MultiplierTableBuilder | None) -> MultiplierTableBuilder:
    return builder or MultiplierTableBuilder()


def step_table(
    m: ManifoldModel,
    cutoff: CutoffProfile,
    t: float,
    f: SpectralState,
    builder: MultiplierTableBuilder | None = None,
) -> MultiplierTable:
    """U_chi(t) on every level of ``f``'s eigenbasis."""

    return _builder(builder).build(m, cutoff, t, f.energy_max)


def sliced_apply(
    m: ManifoldModel,
    cutoff: CutoffProfile,
    plan: SlicingPlan,
    f: SpectralState,
    builder: MultiplierTableBuilder | None = None,
) -> SpectralState:
    """{U_chi(t/N)}^N rho(E) f with one multiplier table per plan."""

    projected = project(f, plan.effective_energy(m.dimension))
    table = step_table(m, cutoff, plan.step, f, builder)
    return table.power(plan.slices).apply(projected)


def single_step_error(
    m: ManifoldModel,
    cutoff: CutoffProfile,
    t: float,
    f: SpectralState,
    builder: MultiplierTableBuilder | None = None,
    *,
    curvature_term: bool = True,
) -> float:
    """||U_chi(t) f - exp(i t (Laplacian - R/6)/2) f||; drop R/6 with ``curvature_term=False``."""

    approx = step_table(m, cutoff, t, f, builder).apply(f)
    return l2_error(approx, exact_propagate(m, t, f, curvature_term=curvature_term))


def identity_defect(
    m: ManifoldModel,
    cutoff: CutoffProfile,
    t: float,
    f: SpectralState,
    builder: MultiplierTableBuilder | None = None,
) -> float:
    """||U_chi(t) f - f||, of order t."""

    return l2_error(step_table(m, cutoff, t, f, builder).apply(f), f)


def unitarity_defect(
    m: ManifoldModel,
    cutoff: CutoffProfile,
    t: float,
    energy: float,
    builder: MultiplierTableBuilder | None = None,
) -> float:
    """max_{E_j <= E} | |lambda_j(t)| - 1 |."""

    return _builder(builder).build(m, cutoff, t, energy).unitarity_defect()


def product_bound(
    m: ManifoldModel,
    cutoff: CutoffProfile,
    t: float,
    energy: float,
    slices: int,
    builder: MultiplierTableBuilder | None = None,
) -> float:
    """(max_{E_j <= E} |lambda_j(t/N)|)^N."""

    table = _builder(builder).build(m, cutoff, t / slices, energy)
    return table.operator_norm() ** slices


@dataclass(slots=True)
class ConvergenceRecord:
    """Per-N errors of a slicing study and the fitted log-log rate."""

    t: float
    policy: ProjectorPolicy
    slices: list[int] = field(default_factory=list)
    energies: list[float] = field(default_factory=list)
    errors: list[float] = field(default_factory=list)
    runtimes_ms: list[float] = field(default_factory=list)
    fit: RateFit | None = None

    @property
    def slope(self) -> float | None:
        return self.fit.slope if self.fit else None

    @property
    def intercept(self) -> float | None:
        return self.fit.intercept if self.fit else None


def convergence_study(
    m: ManifoldModel,
    cutoff: CutoffProfile,
    t: float,
    f: SpectralState,
    slices: Sequence[int],
    policy: ProjectorPolicy = ProjectorPolicy.FIXED_E,
    *,
    energy: float | None = None,
    epsilon: float = 0.1,
    builder: MultiplierTableBuilder | None = None,
) -> ConvergenceRecord:
    """Errors ||sliced - exact(t) rho(E_N) f|| over ``slices`` and their fitted rate."""

    if not slices or any(b <= a for a, b in zip(slices, slices[1:])):
        raise DomainError(
            code="slicing.order",
            message="Slice counts must be a non-empty increasing list.",
            details={"slices": list(slices)},
        )

    record = ConvergenceRecord(t=t, policy=policy)
    for count in slices:
        started = time.perf_counter()
        plan = SlicingPlan(t=t, slices=count, energy=energy, policy=policy, epsilon=epsilon)
        effective = plan.effective_energy(m.dimension)
        approx = sliced_apply(m, cutoff, plan, f, builder)
        exact = exact_propagate(m, t, project(f, effective))
        error = l2_error(approx, exact)
        elapsed = (time.perf_counter() - started) * 1000.0

        record.slices.append(count)
        record.energies.append(effective)
        record.errors.append(error)
        record.runtimes_ms.append(elapsed)
        logger.debug(
            "slicing_cell_finished",
            extra={"manifold": m.key, "t": t, "slices": count, "energy": effective, "error": error},
        )

    points = [(n, e) for n, e in zip(record.slices, record.errors) if e > 0]
    if len(points) >= 3 and len(points) == len(record.slices):
        record.fit = fit_rate(points)
    logger.info(
        "convergence_study_finished",
        extra={"manifold": m.key, "t": t, "policy": policy.value, "slope": record.slope},
    )
    return record


__all__ = [
    "ConvergenceRecord",
    "ProjectorPolicy",
    "SlicingPlan",
    "alpha",
    "convergence_study",
    "identity_defect",
    "product_bound",
    "single_step_error",
    "sliced_apply",
    "step_table",
    "unitarity_defect",
]
