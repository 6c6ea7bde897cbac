"""Pydantic schemas for configs, reports and cached payloads."""

from __future__ import annotations

from .experiment import (
    BoundKind,
    CheckResult,
    ConvergenceRecordPayload,
    EmitFormat,
    EnvironmentInfo,
    ExperimentConfig,
    ExperimentReport,
    FunctionTerm,
    ResultRow,
    StudyKind,
)
from .payloads import CutoffPayload, MultiplierTablePayload, SpectralStatePayload
from .response import ErrorInfo, ErrorResponse, SuccessResponse

__all__ = [
    "BoundKind",
    "CheckResult",
    "ConvergenceRecordPayload",
    "CutoffPayload",
    "EmitFormat",
    "EnvironmentInfo",
    "ErrorInfo",
    "ErrorResponse",
    "ExperimentConfig",
    "ExperimentReport",
    "FunctionTerm",
    "MultiplierTablePayload",
    "ResultRow",
    "SpectralStatePayload",
    "StudyKind",
    "SuccessResponse",
]
