"""Schemas for experiment configuration files and reports."""

from __future__ import annotations

import enum
from pathlib import Path
from typing import Annotated, Optional

from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

from geoprop.propagator import ProjectorPolicy

from .payloads import SpectralStatePayload


class StudyKind(str, enum.Enum):
    """Named studies, one per command-line subcommand."""
    SINGLE_STEP = "single-step"
    SLICE = "slice"
    NORM_SWEEP = "norm-sweep"
    STATIONARY_PHASE = "stationary-phase"
    CURVATURE_LIMIT = "curvature-limit"
    ORACLE = "oracle"
    SPECTRAL_CHECK = "spectral-check"


class EmitFormat(str, enum.Enum):
    """Result files written by a run."""
    CSV = "csv"
    JSON = "json"
    BOTH = "both"


class BoundKind(str, enum.Enum):
    """Error bound asserted on every measured point."""
    NONE = "none"
    T_SQUARED = "t-squared"
    SINGLE_STEP = "single-step"
    SLICING = "slicing"


PositiveFloat = Annotated[float, Field(gt=0)]
PositiveInt = Annotated[int, Field(ge=1)]


class FunctionTerm(BaseModel):
    """One eigenfunction term of a test function: amplitude * u_{level, mode}."""

    model_config = ConfigDict(extra="forbid")

    level: int = Field(ge=0)
    mode: int = Field(default=0, ge=0)
    amplitude: tuple[float, float] = (1.0, 0.0)


class ExperimentConfig(BaseModel):
    """A reproducible study; every field can also be set from the command line."""

    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    name: str = "experiment"
    study: StudyKind
    manifold: str = "circle:1"
    manifolds: list[str] = Field(default_factory=list)

    cutoff_support: Optional[float] = Field(default=None, gt=0, lt=1)
    cutoff_plateau: Optional[float] = Field(default=None, gt=0, lt=1)
    cutoff_sharpness: float = Field(default=1.0, gt=0)

    t: PositiveFloat = 1.0
    times: list[PositiveFloat] = Field(default_factory=list)
    slices: list[PositiveInt] = Field(default_factory=lambda: [1])
    policy: ProjectorPolicy = ProjectorPolicy.FIXED_E
    energy: Optional[float] = Field(default=None, ge=0)
    energy_max: float = Field(default=4.0, ge=0)
    epsilon: Optional[float] = Field(default=None, gt=0)

    function: list[FunctionTerm] = Field(default_factory=list)
    random_levels: Optional[int] = Field(default=None, ge=1)
    seed: int = 0
    curvature_term: bool = True

    expected_slope: Optional[float] = None
    slope_tolerance: float = Field(default=0.3, gt=0)
    bound: BoundKind = BoundKind.NONE
    bound_constant: float = Field(default=1.0, gt=0)
    max_error: Optional[float] = Field(default=None, gt=0)
    defect_constant: Optional[float] = Field(default=None, gt=0)
    product_slices: Optional[int] = Field(default=None, ge=1)
    product_limit: float = Field(default=1.5, gt=0)

    dimension: int = Field(default=2, ge=1, le=3)
    orders: list[PositiveInt] = Field(default_factory=lambda: [1, 2])
    patch_plateau: float = Field(default=3.0, gt=0)
    patch_support: float = Field(default=5.0, gt=0)

    step: float = Field(default=1e-3, gt=0)
    tolerance: Optional[float] = Field(default=None, gt=0)

    samples: int = Field(default=20, ge=1)
    time_range: tuple[PositiveFloat, PositiveFloat] = (0.2, 0.5)
    max_level: int = Field(default=3, ge=0)
    dense_budget: int = Field(default=8, ge=4)

    oscillation_budget: Optional[int] = Field(default=None, ge=8)
    quadrature_tolerance: Optional[float] = Field(default=None, gt=0)

    output_dir: Optional[Path] = None
    emit: EmitFormat = EmitFormat.BOTH
    record_runtime: bool = True

    @field_validator("slices")
    @classmethod
    def _increasing_slices(cls, value: list[int]) -> list[int]:
        if not value or any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("slices must be a non-empty strictly increasing list")
        return value

    @field_validator("time_range")
    @classmethod
    def _ordered_range(cls, value: tuple[float, float]) -> tuple[float, float]:
        if value[0] > value[1]:
            raise ValueError("time_range must be ordered (low, high)")
        return value

    @model_validator(mode="after")
    def _check_study(self) -> ExperimentConfig:
        if self.patch_plateau >= self.patch_support:
            raise ValueError("patch_plateau must be below patch_support")
        needs_times = {StudyKind.SINGLE_STEP, StudyKind.NORM_SWEEP, StudyKind.STATIONARY_PHASE}
        if self.study in needs_times and not self.times:
            raise ValueError(f"times must be non-empty for the {self.study.value} study")
        return self


class CheckResult(BaseModel):
    """One pass/fail assertion of a study."""

    name: str
    passed: bool
    observed: Optional[float] = None
    expected: Optional[float] = None
    tolerance: Optional[float] = None
    detail: Optional[str] = None


class ConvergenceRecordPayload(BaseModel):
    """Measured errors along one sweep variable plus the fitted log-log rate."""

    label: str
    variable: str
    x: list[float]
    errors: list[float]
    energies: list[float] = Field(default_factory=list)
    runtimes_ms: list[float] = Field(default_factory=list)
    slope: Optional[float] = None
    intercept: Optional[float] = None
    residual: Optional[float] = None


class ResultRow(BaseModel):
    """One CSV line; columns keep this order."""

    manifold: str
    t: float
    N: int
    E_policy: str
    E_effective: float
    l2_error: float
    runtime_ms: float


class EnvironmentInfo(BaseModel):
    package_version: str
    python: str
    numpy: str
    scipy: str
    platform: str


class ExperimentReport(BaseModel):
    """Self-contained result: re-running ``config`` reproduces it."""

    config: ExperimentConfig
    records: list[ConvergenceRecordPayload] = Field(default_factory=list)
    rows: list[ResultRow] = Field(default_factory=list)
    checks: list[CheckResult] = Field(default_factory=list)
    fitted: dict[str, float] = Field(default_factory=dict)
    test_function: Optional[SpectralStatePayload] = None
    environment: EnvironmentInfo
    outputs: list[str] = Field(default_factory=list)
    runtime_ms: float = 0.0

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


__all__ = [
    "BoundKind",
    "CheckResult",
    "ConvergenceRecordPayload",
    "EmitFormat",
    "EnvironmentInfo",
    "ExperimentConfig",
    "ExperimentReport",
    "FunctionTerm",
    "ResultRow",
    "StudyKind",
]
