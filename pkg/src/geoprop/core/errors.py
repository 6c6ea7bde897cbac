"""Custom exception hierarchy for the geoprop laboratory."""

from __future__ import annotations

from typing import Any, Optional


class BaseLabError(Exception):
    """Base exception carrying CLI-friendly metadata."""

    def __init__(
        self,
        *,
        code: str,
        message: str,
        exit_code: int = 1,
        details: Optional[Any] = None,
    ) -> None:
        if not code:
            raise ValueError("Error code must be a non-empty string.")
        if not message:
            raise ValueError("Error message must be a non-empty string.")

        self.code = code
        self.message = message
        self.exit_code = exit_code
        self.details = details

        super().__init__(message)

    def __str__(self) -> str:  # pragma: no cover - human-readable helper
        base = f"{self.code}: {self.message} (exit={self.exit_code})"
        if self.details is not None:
            return f"{base} details={self.details!r}"
        return base


class DomainError(BaseLabError):
    """Raised when geometric preconditions or usage rules fail."""

    def __init__(
        self,
        *,
        code: str,
        message: str,
        exit_code: int = 2,
        details: Optional[Any] = None,
    ) -> None:
        super().__init__(
            code=code,
            message=message,
            exit_code=exit_code,
            details=details,
        )


class GeometryError(DomainError):
    """Raised for radii or points outside the chart of a manifold."""


class UsageError(DomainError):
    """Raised when incompatible objects are combined."""


class FitError(DomainError):
    """Raised when a rate fit receives unusable points."""


class ConfigError(DomainError):
    """Raised when an experiment configuration is invalid.

    The offending field is always named in the message and in ``details``.
    """

    def __init__(
        self,
        *,
        field: str,
        message: str,
        code: str = "config.invalid",
        details: Optional[dict[str, Any]] = None,
    ) -> None:
        self.field = field
        payload = {"field": field}
        if details:
            payload.update(details)
        super().__init__(
            code=code,
            message=f"{field}: {message}",
            details=payload,
        )


class ManifoldKeyError(ConfigError):
    """Raised for an unknown or malformed manifold key."""

    def __init__(self, key: str, reason: str) -> None:
        super().__init__(
            field="manifold",
            code="config.manifold",
            message=f"cannot resolve manifold key {key!r} ({reason})",
            details={"key": key},
        )


class LevelResolutionError(ConfigError):
    """Raised when a test function references levels outside the eigen-data."""

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(
            field="function",
            code="config.levels",
            message=message,
            details=details,
        )


class NumericalError(BaseLabError):
    """Raised when a numerical procedure fails to reach its tolerance."""

    def __init__(
        self,
        *,
        code: str,
        message: str,
        exit_code: int = 3,
        details: Optional[Any] = None,
    ) -> None:
        super().__init__(
            code=code,
            message=message,
            exit_code=exit_code,
            details=details,
        )


class QuadratureConvergenceError(NumericalError):
    """Raised when two refinement levels of a quadrature disagree."""

    def __init__(self, message: str, trace: list[dict[str, Any]]) -> None:
        self.trace = trace
        super().__init__(
            code="numerics.quadrature",
            message=message,
            details={"trace": trace},
        )


class ResolutionError(NumericalError):
    """Raised when a grid or difference step is too coarse for its target."""

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(
            code="numerics.resolution",
            message=message,
            details=details or None,
        )


class RepositoryError(BaseLabError):
    """Raised when result persistence or cache access fails."""

    def __init__(
        self,
        *,
        code: str,
        message: str,
        exit_code: int = 4,
        details: Optional[Any] = None,
    ) -> None:
        super().__init__(
            code=code,
            message=message,
            exit_code=exit_code,
            details=details,
        )


__all__ = [
    "BaseLabError",
    "DomainError",
    "GeometryError",
    "UsageError",
    "FitError",
    "ConfigError",
    "ManifoldKeyError",
    "LevelResolutionError",
    "NumericalError",
    "QuadratureConvergenceError",
    "ResolutionError",
    "RepositoryError",
]
