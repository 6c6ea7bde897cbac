from __future__ import annotations

import json

import pytest

from geoprop.core.errors import ConfigError, LevelResolutionError, ManifoldKeyError
from geoprop.schemas import ExperimentConfig, StudyKind


def _config(**fields) -> ExperimentConfig:
    fields.setdefault("record_runtime", False)
    return ExperimentConfig(**fields)


def _check(report, name):
    return next(check for check in report.checks if check.name == name)


def test_circle_single_step_passes_t_squared_bound(service, tmp_path):
    config = _config(
        name="circle_step",
        study=StudyKind.SINGLE_STEP,
        manifold="circle:1",
        function=[{"level": 2}],
        times=[0.2, 0.1, 0.05, 0.025],
        bound="t-squared",
    )

    report = service.run(config)

    assert report.passed
    assert [row.t for row in report.rows] == [0.2, 0.1, 0.05, 0.025]
    assert _check(report, "error_below_t_squared").observed <= 1.0
    assert report.test_function is not None
    assert report.test_function.coefficients == [(2, 0, 1.0, 0.0)]
    assert all(row.runtime_ms == 0.0 for row in report.rows)
    assert (tmp_path / "results" / "circle_step.csv").exists()
    assert json.loads((tmp_path / "results" / "circle_step.json").read_text())["passed"] is True
    assert len(report.outputs) == 2


def test_curvature_term_detection(service):
    config = _config(
        study=StudyKind.SINGLE_STEP,
        manifold="sphere2:1",
        function=[{"level": 1, "mode": 1}],
        energy_max=2.0,
        times=[0.005, 0.0025, 0.00125, 0.000625],
        curvature_term=False,
        expected_slope=1.0,
        emit="csv",
    )

    report = service.run(config)

    assert report.passed
    assert _check(report, "curvature_term_improves_every_step").passed
    assert report.fitted["corrected_slope"] == pytest.approx(2.0, abs=0.3)
    assert [record.label for record in report.records] == ["single-step-uncorrected", "single-step"]


def test_single_slice_reduces_to_single_step(service):
    common = dict(manifold="circle:1", function=[{"level": 1}], energy_max=1.0, energy=1.0)
    step = service.run(_config(study=StudyKind.SINGLE_STEP, times=[0.0125], **common))
    sliced = service.run(_config(study=StudyKind.SLICE, t=0.0125, slices=[1], **common))

    assert sliced.rows[0].l2_error == pytest.approx(step.rows[0].l2_error)
    assert sliced.rows[0].N == 1


def test_torus_slicing_bound(service):
    config = _config(
        study=StudyKind.SLICE,
        manifold="torus:2pi,2pi",
        function=[{"level": 0}, {"level": 1}, {"level": 2, "mode": 1, "amplitude": [0.0, 1.0]}],
        energy_max=2.0,
        energy=2.0,
        t=1.0,
        slices=[4, 8, 16, 32, 64],
        bound="slicing",
        max_error=1e-3,
    )

    report = service.run(config)

    assert report.passed, report.checks
    assert [row.N for row in report.rows] == [4, 8, 16, 32, 64]
    assert {row.E_policy for row in report.rows} == {"fixed"}


def test_norm_sweep_records_defect_and_product_bound(service):
    config = _config(
        study=StudyKind.NORM_SWEEP,
        manifold="circle:1",
        energy=16.0,
        times=[0.2, 0.1, 0.05, 0.01],
        defect_constant=1.0,
        t=1.0,
        product_slices=64,
    )

    report = service.run(config)

    assert report.passed
    assert report.fitted["product_bound"] <= 1.5
    assert "max_operator_norm" in report.fitted


def test_stationary_phase_orders(service):
    report = service.run(_config(study=StudyKind.STATIONARY_PHASE, times=[0.2, 0.1, 0.05]))

    assert report.passed
    assert report.fitted["slope_k1"] == pytest.approx(2.0, abs=0.3)
    assert report.fitted["slope_k2"] == pytest.approx(3.0, abs=0.3)


@pytest.mark.parametrize("key, expected, tolerance", [("sphere2:1", 1 / 3, 1e-4), ("torus:2pi,2pi", 0.0, 1e-10)])
def test_curvature_limit_study(service, key, expected, tolerance):
    report = service.run(_config(study=StudyKind.CURVATURE_LIMIT, manifold=key, tolerance=tolerance))

    assert report.passed
    assert report.fitted["laplacian"] == pytest.approx(expected, abs=tolerance)
    assert _check(report, "transport_equation").passed


def test_oracle_study(service):
    config = _config(
        study=StudyKind.ORACLE,
        manifolds=["circle:1", "torus:2pi,2pi", "sphere2:1"],
        samples=3,
        seed=11,
        max_level=2,
    )

    report = service.run(config)

    assert report.passed
    assert [row.manifold.split(":")[0] for row in report.rows] == ["circle", "torus", "sphere2"]
    assert report.fitted["max_gap"] <= 1e-6


@pytest.mark.parametrize("key", ["circle:1", "torus:2pi,2pi", "sphere2:1"])
def test_spectral_check_study(service, key):
    report = service.run(_config(study=StudyKind.SPECTRAL_CHECK, manifold=key, energy_max=12.0, seed=3))

    assert report.passed
    assert {check.name for check in report.checks} == {
        "orthonormality",
        "group_law",
        "projector_idempotent",
        "parseval",
    }


def test_identical_configs_give_identical_csv(service, tmp_path):
    config = _config(
        name="repeat",
        study=StudyKind.SLICE,
        manifold="circle:1",
        function=[{"level": 1}],
        energy_max=1.0,
        energy=1.0,
        t=0.5,
        slices=[4, 8],
        emit="csv",
    )
    path = tmp_path / "results" / "repeat.csv"

    service.run(config)
    first = path.read_bytes()
    service.run(config)

    assert path.read_bytes() == first


def test_unknown_manifold_names_manifold_field(service):
    with pytest.raises(ManifoldKeyError) as excinfo:
        service.run(_config(study=StudyKind.CURVATURE_LIMIT, manifold="sphere3:1"))

    assert excinfo.value.details["field"] == "manifold"


def test_missing_test_function(service):
    with pytest.raises(ConfigError) as excinfo:
        service.run(_config(study=StudyKind.SINGLE_STEP, times=[0.1]))

    assert excinfo.value.field == "function"


def test_level_outside_energy_window(service):
    with pytest.raises(LevelResolutionError):
        service.run(_config(study=StudyKind.SINGLE_STEP, times=[0.1], function=[{"level": 5}], energy_max=4.0))


def test_failed_bound_marks_report_failed(service):
    config = _config(
        study=StudyKind.SINGLE_STEP,
        manifold="circle:1",
        function=[{"level": 1}],
        energy_max=1.0,
        times=[0.05, 0.025, 0.0125],
        expected_slope=-3.0,
        slope_tolerance=0.1,
    )

    report = service.run(config)

    assert not report.passed
    assert not _check(report, "single_step_order").passed
