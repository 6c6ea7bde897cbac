"""Envelopes printed by the command-line front end."""

from __future__ import annotations

from typing import Any, Generic, Literal, Optional, TypeVar

from pydantic import BaseModel, Field


PayloadT = TypeVar("PayloadT")


class SuccessResponse(BaseModel, Generic[PayloadT]):
    """Envelope for a finished command; ``passed`` mirrors the acceptance checks."""

    status: Literal["success"] = Field(default="success", frozen=True)
    command: str
    passed: bool = True
    data: PayloadT


class ErrorInfo(BaseModel):
    """Structured information describing a failed command."""

    code: str = Field(..., description="Stable machine-readable error code.")
    message: str = Field(..., description="Human-readable error message.")
    exit_code: int = Field(default=1, description="Process exit status for this error.")
    details: Optional[Any] = Field(default=None, description="Optional error context.")


class ErrorResponse(BaseModel):
    """Envelope written to stderr when a command fails."""

    status: Literal["error"] = Field(default="error", frozen=True)
    command: str
    error: ErrorInfo


__all__ = ["SuccessResponse", "ErrorInfo", "ErrorResponse"]
