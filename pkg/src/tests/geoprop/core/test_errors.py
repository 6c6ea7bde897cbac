from __future__ import annotations

import pytest

from geoprop.core.errors import (
    BaseLabError,
    ConfigError,
    DomainError,
    LevelResolutionError,
    ManifoldKeyError,
    NumericalError,
    QuadratureConvergenceError,
    RepositoryError,
    ResolutionError,
)


def test_empty_code_or_message_is_rejected():
    with pytest.raises(ValueError):
        BaseLabError(code="", message="x")
    with pytest.raises(ValueError):
        BaseLabError(code="x", message="")


def test_exit_codes_follow_the_error_family():
    assert DomainError(code="d", message="m").exit_code == 2
    assert ConfigError(field="t", message="m").exit_code == 2
    assert NumericalError(code="n", message="m").exit_code == 3
    assert RepositoryError(code="r", message="m").exit_code == 4


def test_config_errors_name_the_field():
    error = ConfigError(field="slices", message="must increase", details={"value": [4, 2]})

    assert error.message.startswith("slices:")
    assert error.details == {"field": "slices", "value": [4, 2]}
    assert error.field == "slices"


def test_manifold_key_error_points_at_manifold_field():
    error = ManifoldKeyError("sphere3:1", "unknown manifold 'sphere3'")

    assert error.code == "config.manifold"
    assert error.field == "manifold"
    assert "sphere3" in error.message


def test_level_resolution_error_points_at_function_field():
    error = LevelResolutionError("level 9 missing", level=9)

    assert error.field == "function"
    assert error.details["level"] == 9


def test_numerical_errors_carry_diagnostics():
    trace = [{"refinement": 0, "nodes": 32}, {"refinement": 1, "nodes": 64, "estimate": 0.1}]
    quadrature = QuadratureConvergenceError("no convergence", trace)
    resolution = ResolutionError("too coarse", step=0.1)

    assert quadrature.trace == trace
    assert quadrature.details == {"trace": trace}
    assert resolution.code == "numerics.resolution"
    assert resolution.details == {"step": 0.1}
