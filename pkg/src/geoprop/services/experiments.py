"""Experiment orchestration: builds the numerical objects for a config and runs one study."""

from __future__ import annotations

import logging
import math
import platform
import time
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

import numpy as np
import scipy

import geoprop
from geoprop.core.cache import create_cache_client, get_cache_client
from geoprop.core.config import LabSettings, get_settings
from geoprop.core.errors import ConfigError
from geoprop.geometry import ManifoldModel, parse_manifold
from geoprop.kernel import CutoffProfile, curvature_limit_check, transport_residual
from geoprop.propagator import (
    ConvergenceRecord,
    ProjectorPolicy,
    RateFit,
    alpha,
    convergence_study,
    fit_rate,
    product_bound,
    single_step_error,
)
from geoprop.quadrature import (
    MultiplierTableBuilder,
    dense_multiplier,
    gaussian_laplacian_powers,
    multiplier,
    patch_integral,
    stationary_phase_expansion,
)
from geoprop.repositories import MultiplierCache, ResultsRepository
from geoprop.schemas import (
    BoundKind,
    CheckResult,
    ConvergenceRecordPayload,
    EmitFormat,
    EnvironmentInfo,
    ExperimentConfig,
    ExperimentReport,
    ResultRow,
    SpectralStatePayload,
    StudyKind,
)
from geoprop.spectral import (
    EigenLevel,
    SpectralState,
    eigenlevels,
    exact_propagate,
    orthonormality_defect,
    project,
    sobolev_norm,
    spectral_grid,
)

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

CURVATURE_TOLERANCE = 1e-4
ORACLE_TOLERANCE = 1e-6
ORTHONORMALITY_TOLERANCE = 1e-10
GROUP_LAW_TOLERANCE = 1e-12
PARSEVAL_TOLERANCE = 1e-10
TRANSPORT_TOLERANCE = 1e-8


class StudyOutcome:
    """Mutable accumulator for one study run."""

    def __init__(self) -> None:
        self.records: list[ConvergenceRecordPayload] = []
        self.rows: list[ResultRow] = []
        self.checks: list[CheckResult] = []
        self.fitted: dict[str, float] = {}
        self.test_function: SpectralStatePayload | None = None

    def check(
        self,
        name: str,
        passed: bool,
        *,
        observed: float | None = None,
        expected: float | None = None,
        tolerance: float | None = None,
        detail: str | None = None,
    ) -> None:
        self.checks.append(
            CheckResult(
                name=name,
                passed=bool(passed),
                observed=observed,
                expected=expected,
                tolerance=tolerance,
                detail=detail,
            )
        )


def environment_info() -> EnvironmentInfo:
    return EnvironmentInfo(
        package_version=geoprop.__version__,
        python=platform.python_version(),
        numpy=np.__version__,
        scipy=scipy.__version__,
        platform=platform.platform(),
    )


def _positive_fit(xs: Sequence[float], ys: Sequence[float]) -> RateFit | None:
    points = [(x, y) for x, y in zip(xs, ys)]
    if len(points) < 3 or any(y <= 0 for _, y in points):
        return None
    return fit_rate(points)


class ExperimentService:
    """Runs experiment configs against cached multiplier tables and writes results."""

    def __init__(
        self,
        settings: LabSettings | None = None,
        cache: MultiplierCache | None = None,
        results: ResultsRepository | None = None,
    ) -> None:
        self.settings = settings or get_settings()
        if cache is None:
            client = create_cache_client(settings) if settings is not None else get_cache_client()
            cache = MultiplierCache(
                client, ttl=self.settings.cache_ttl, max_entries=self.settings.cache_max_entries
            )
        self.cache = cache
        self.results = results

    # Object construction
    def manifold(self, key: str) -> ManifoldModel:
        return parse_manifold(key)

    def cutoff(self, m: ManifoldModel, config: ExperimentConfig) -> CutoffProfile:
        return CutoffProfile.for_manifold(
            m,
            support_fraction=config.cutoff_support or self.settings.cutoff_support,
            plateau_fraction=config.cutoff_plateau or self.settings.cutoff_plateau,
            sharpness=config.cutoff_sharpness,
        )

    def builder(self, config: ExperimentConfig) -> MultiplierTableBuilder:
        return MultiplierTableBuilder(
            budget=config.oscillation_budget or self.settings.oscillation_budget,
            tolerance=config.quadrature_tolerance or self.settings.quadrature_tolerance,
            store=self.cache,
        )

    def state(self, m: ManifoldModel, config: ExperimentConfig) -> SpectralState:
        """Normalized test function from eigenfunction terms or seeded random levels."""

        if config.function:
            terms = [
                (term.level, term.mode, complex(*term.amplitude)) for term in config.function
            ]
            state = SpectralState.from_terms(m, config.energy_max, terms)
            if state.norm() == 0:
                raise ConfigError(field="function", message="test function is identically zero")
            return state.normalized()
        if config.random_levels:
            return SpectralState.random(
                m, config.energy_max, config.seed, levels=config.random_levels
            )
        raise ConfigError(
            field="function",
            message="give eigenfunction terms or random_levels for the test function",
        )

    def _map(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        if self.settings.workers <= 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.settings.workers) as pool:
            return list(pool.map(fn, items))

    def _runtime(self, config: ExperimentConfig, elapsed_ms: float) -> float:
        return elapsed_ms if config.record_runtime else 0.0

    # Entry point
    def run(self, config: ExperimentConfig) -> ExperimentReport:
        """Execute ``config.study`` and emit CSV/JSON results when an output directory is set."""

        handlers: dict[StudyKind, Callable[[ExperimentConfig, StudyOutcome], None]] = {
            StudyKind.SINGLE_STEP: self._single_step,
            StudyKind.SLICE: self._slice,
            StudyKind.NORM_SWEEP: self._norm_sweep,
            StudyKind.STATIONARY_PHASE: self._stationary_phase,
            StudyKind.CURVATURE_LIMIT: self._curvature_limit,
            StudyKind.ORACLE: self._oracle,
            StudyKind.SPECTRAL_CHECK: self._spectral_check,
        }

        logger.info(
            "experiment_started",
            extra={"experiment": config.name, "study": config.study.value, "manifold": config.manifold},
        )
        started = time.perf_counter()
        outcome = StudyOutcome()
        handlers[config.study](config, outcome)
        elapsed = (time.perf_counter() - started) * 1000.0

        report = ExperimentReport(
            config=config,
            records=outcome.records,
            rows=outcome.rows,
            checks=outcome.checks,
            fitted=outcome.fitted,
            test_function=outcome.test_function,
            environment=environment_info(),
            runtime_ms=self._runtime(config, elapsed),
        )
        self._emit(config, report)

        logger.info(
            "experiment_finished",
            extra={
                "experiment": config.name,
                "study": config.study.value,
                "passed": report.passed,
                "runtime_ms": round(elapsed, 3),
            },
        )
        return report

    def _emit(self, config: ExperimentConfig, report: ExperimentReport) -> None:
        repository = self.results
        if config.output_dir is not None:
            repository = ResultsRepository(config.output_dir)
        if repository is None:
            return

        if config.emit in (EmitFormat.CSV, EmitFormat.BOTH):
            path = repository.write_csv(config.name, report.rows)
            report.outputs.append(str(path))
        if config.emit in (EmitFormat.JSON, EmitFormat.BOTH):
            report.outputs.append(str(repository.output_dir / f"{config.name}.json"))
            repository.write_json(config.name, report)

    # Studies
    def _slope_check(
        self, outcome: StudyOutcome, config: ExperimentConfig, name: str, fit: RateFit | None
    ) -> None:
        if config.expected_slope is None:
            return
        if fit is None:
            outcome.check(
                name,
                False,
                expected=config.expected_slope,
                tolerance=config.slope_tolerance,
                detail="fewer than 3 positive points to fit",
            )
            return
        outcome.check(
            name,
            fit.within(config.expected_slope, config.slope_tolerance),
            observed=fit.slope,
            expected=config.expected_slope,
            tolerance=config.slope_tolerance,
        )

    def _single_step(self, config: ExperimentConfig, outcome: StudyOutcome) -> None:
        m = self.manifold(config.manifold)
        cutoff = self.cutoff(m, config)
        builder = self.builder(config)
        f = self.state(m, config)
        outcome.test_function = SpectralStatePayload.model_validate(f.to_payload())

        def measure(t: float, curvature_term: bool) -> tuple[float, float]:
            started = time.perf_counter()
            error = single_step_error(m, cutoff, t, f, builder, curvature_term=curvature_term)
            return error, (time.perf_counter() - started) * 1000.0

        measured = self._map(lambda t: measure(t, config.curvature_term), config.times)
        errors = [error for error, _ in measured]
        runtimes = [self._runtime(config, ms) for _, ms in measured]
        fit = _positive_fit(config.times, errors)

        label = "single-step" if config.curvature_term else "single-step-uncorrected"
        outcome.records.append(
            ConvergenceRecordPayload(
                label=label,
                variable="t",
                x=list(config.times),
                errors=errors,
                runtimes_ms=runtimes,
                slope=fit.slope if fit else None,
                intercept=fit.intercept if fit else None,
                residual=fit.residual if fit else None,
            )
        )
        for t, error, runtime in zip(config.times, errors, runtimes):
            outcome.rows.append(
                ResultRow(
                    manifold=m.key,
                    t=t,
                    N=1,
                    E_policy="corrected" if config.curvature_term else "uncorrected",
                    E_effective=f.energy_max,
                    l2_error=error,
                    runtime_ms=runtime,
                )
            )
        if fit:
            outcome.fitted["slope"] = fit.slope
        self._slope_check(outcome, config, "single_step_order", fit)

        exponent = 2 * alpha(m.dimension)
        weight = sobolev_norm(f, exponent)
        outcome.fitted["sobolev_norm"] = weight
        outcome.fitted["bound_constant"] = max(
            2 * error / (t * t * weight) for t, error in zip(config.times, errors)
        )

        if config.bound is BoundKind.T_SQUARED:
            worst = max(error / (t * t) for t, error in zip(config.times, errors))
            outcome.check("error_below_t_squared", worst <= config.bound_constant, observed=worst, expected=config.bound_constant)
        elif config.bound is BoundKind.SINGLE_STEP:
            worst = outcome.fitted["bound_constant"]
            outcome.check("single_step_bound", worst <= config.bound_constant, observed=worst, expected=config.bound_constant)

        if config.max_error is not None:
            outcome.check("max_error", max(errors) <= config.max_error, observed=max(errors), expected=config.max_error)

        if not config.curvature_term:
            corrected = [error for error, _ in self._map(lambda t: measure(t, True), config.times)]
            corrected_fit = _positive_fit(config.times, corrected)
            outcome.records.append(
                ConvergenceRecordPayload(
                    label="single-step",
                    variable="t",
                    x=list(config.times),
                    errors=corrected,
                    slope=corrected_fit.slope if corrected_fit else None,
                    intercept=corrected_fit.intercept if corrected_fit else None,
                    residual=corrected_fit.residual if corrected_fit else None,
                )
            )
            if corrected_fit:
                outcome.fitted["corrected_slope"] = corrected_fit.slope
            outcome.check(
                "curvature_term_improves_every_step",
                all(c < u for c, u in zip(corrected, errors)),
                detail="errors with R/6 must be strictly below errors without it",
            )
            if fit and corrected_fit:
                outcome.check(
                    "curvature_term_improves_order",
                    corrected_fit.slope > fit.slope,
                    observed=corrected_fit.slope - fit.slope,
                    expected=0.0,
                )

    def _slice(self, config: ExperimentConfig, outcome: StudyOutcome) -> None:
        m = self.manifold(config.manifold)
        cutoff = self.cutoff(m, config)
        f = self.state(m, config)
        outcome.test_function = SpectralStatePayload.model_validate(f.to_payload())
        energy = config.energy if config.energy is not None else config.energy_max
        epsilon = config.epsilon or self.settings.rho_epsilon

        record: ConvergenceRecord = convergence_study(
            m,
            cutoff,
            config.t,
            f,
            config.slices,
            config.policy,
            energy=energy,
            epsilon=epsilon,
            builder=self.builder(config),
        )
        runtimes = [self._runtime(config, ms) for ms in record.runtimes_ms]
        outcome.records.append(
            ConvergenceRecordPayload(
                label="slicing",
                variable="N",
                x=[float(n) for n in record.slices],
                errors=record.errors,
                energies=record.energies,
                runtimes_ms=runtimes,
                slope=record.slope,
                intercept=record.intercept,
                residual=record.fit.residual if record.fit else None,
            )
        )
        for count, effective, error, runtime in zip(record.slices, record.energies, record.errors, runtimes):
            outcome.rows.append(
                ResultRow(
                    manifold=m.key,
                    t=config.t,
                    N=count,
                    E_policy=config.policy.value,
                    E_effective=effective,
                    l2_error=error,
                    runtime_ms=runtime,
                )
            )
        if record.fit:
            outcome.fitted["slope"] = record.fit.slope
        self._slope_check(outcome, config, "slicing_order", record.fit)

        a = alpha(m.dimension)
        constants = [
            error * 2 * count / ((effective + 1) ** a * config.t**2)
            for count, effective, error in zip(record.slices, record.energies, record.errors)
        ]
        outcome.fitted["bound_constant"] = max(constants)
        if config.bound is BoundKind.SLICING:
            outcome.check(
                "slicing_bound",
                max(constants) <= config.bound_constant,
                observed=max(constants),
                expected=config.bound_constant,
            )

        if len(record.errors) > 1:
            outcome.check(
                "error_decreases",
                record.errors[-1] < record.errors[0],
                observed=record.errors[-1],
                expected=record.errors[0],
            )
        if config.max_error is not None:
            outcome.check(
                "final_error",
                record.errors[-1] <= config.max_error,
                observed=record.errors[-1],
                expected=config.max_error,
            )

    def _norm_sweep(self, config: ExperimentConfig, outcome: StudyOutcome) -> None:
        m = self.manifold(config.manifold)
        cutoff = self.cutoff(m, config)
        builder = self.builder(config)
        energy = config.energy if config.energy is not None else config.energy_max

        def measure(t: float) -> tuple[float, float, float]:
            started = time.perf_counter()
            table = builder.build(m, cutoff, t, energy)
            elapsed = (time.perf_counter() - started) * 1000.0
            return table.unitarity_defect(), table.operator_norm(), elapsed

        measured = self._map(measure, config.times)
        defects = [defect for defect, _, _ in measured]
        norms = [norm for _, norm, _ in measured]
        runtimes = [self._runtime(config, ms) for _, _, ms in measured]
        fit = _positive_fit(config.times, defects)

        outcome.records.append(
            ConvergenceRecordPayload(
                label="unitarity-defect",
                variable="t",
                x=list(config.times),
                errors=defects,
                energies=[energy] * len(defects),
                runtimes_ms=runtimes,
                slope=fit.slope if fit else None,
                intercept=fit.intercept if fit else None,
                residual=fit.residual if fit else None,
            )
        )
        for t, defect, runtime in zip(config.times, defects, runtimes):
            outcome.rows.append(
                ResultRow(
                    manifold=m.key,
                    t=t,
                    N=1,
                    E_policy=ProjectorPolicy.FIXED_E.value,
                    E_effective=energy,
                    l2_error=defect,
                    runtime_ms=runtime,
                )
            )
        if fit:
            outcome.fitted["defect_slope"] = fit.slope
        outcome.fitted["max_operator_norm"] = max(norms)
        outcome.fitted["norm_constant"] = max((norm - 1.0) / t for t, norm in zip(config.times, norms))

        if config.defect_constant is not None:
            worst = max(defect / t for t, defect in zip(config.times, defects))
            outcome.check(
                "defect_linear_in_t",
                worst <= config.defect_constant,
                observed=worst,
                expected=config.defect_constant,
            )
        self._slope_check(outcome, config, "defect_order", fit)

        if config.product_slices is not None:
            bound = product_bound(m, cutoff, config.t, energy, config.product_slices, builder)
            outcome.fitted["product_bound"] = bound
            outcome.check(
                "product_bound",
                bound <= config.product_limit,
                observed=bound,
                expected=config.product_limit,
            )

    def _stationary_phase(self, config: ExperimentConfig, outcome: StudyOutcome) -> None:
        n = config.dimension
        cutoff = CutoffProfile(config.patch_plateau, config.patch_support)
        powers = gaussian_laplacian_powers(n, max(config.orders))

        def bump(r: np.ndarray) -> np.ndarray:
            return np.exp(-(r**2))

        integrals = self._map(lambda t: patch_integral(bump, t, cutoff, n), config.times)
        for k in config.orders:
            residuals = [
                abs(value - stationary_phase_expansion(powers, t, k, n))
                for t, value in zip(config.times, integrals)
            ]
            fit = _positive_fit(config.times, residuals)
            outcome.records.append(
                ConvergenceRecordPayload(
                    label=f"stationary-phase-k{k}",
                    variable="t",
                    x=list(config.times),
                    errors=residuals,
                    slope=fit.slope if fit else None,
                    intercept=fit.intercept if fit else None,
                    residual=fit.residual if fit else None,
                )
            )
            for t, residual in zip(config.times, residuals):
                outcome.rows.append(
                    ResultRow(
                        manifold=f"patch:R{n}",
                        t=t,
                        N=k,
                        E_policy="order",
                        E_effective=0.0,
                        l2_error=residual,
                        runtime_ms=0.0,
                    )
                )
            expected = n / 2 + k
            if fit:
                outcome.fitted[f"slope_k{k}"] = fit.slope
            outcome.check(
                f"residual_order_k{k}",
                fit is not None and fit.within(expected, config.slope_tolerance),
                observed=fit.slope if fit else None,
                expected=expected,
                tolerance=config.slope_tolerance,
            )

    def _curvature_limit(self, config: ExperimentConfig, outcome: StudyOutcome) -> None:
        m = self.manifold(config.manifold)
        tolerance = config.tolerance or CURVATURE_TOLERANCE
        value = curvature_limit_check(m, config.t, config.step)
        expected = config.t ** (-m.dimension / 2) * m.scalar_curvature / 6.0
        deviation = abs(value - expected)

        outcome.fitted["laplacian"] = value
        outcome.fitted["expected"] = expected
        outcome.rows.append(
            ResultRow(
                manifold=m.key,
                t=config.t,
                N=0,
                E_policy="curvature-limit",
                E_effective=0.0,
                l2_error=deviation,
                runtime_ms=0.0,
            )
        )
        outcome.check(
            "curvature_limit",
            deviation <= tolerance,
            observed=value,
            expected=expected,
            tolerance=tolerance,
        )

        radii = np.linspace(0.1, min(2.0, 0.9 * m.injectivity_radius), 8)
        residual = max(
            transport_residual(m, t, float(r)) for t in (0.5, 1.0, 2.0) for r in radii
        )
        outcome.fitted["transport_residual"] = residual
        outcome.check(
            "transport_equation",
            residual <= TRANSPORT_TOLERANCE,
            observed=residual,
            tolerance=TRANSPORT_TOLERANCE,
        )

    def _leading_levels(self, m: ManifoldModel, count: int) -> list[EigenLevel]:
        energy = 1.0 / m.injectivity_radius**2
        levels = eigenlevels(m, energy)
        while len(levels) < count:
            energy *= 2.0
            levels = eigenlevels(m, energy)
        return levels[:count]

    def _oracle(self, config: ExperimentConfig, outcome: StudyOutcome) -> None:
        keys = config.manifolds or [config.manifold]
        tolerance = config.tolerance or ORACLE_TOLERANCE
        budget = config.oscillation_budget or self.settings.oscillation_budget
        quad_tolerance = config.quadrature_tolerance or self.settings.quadrature_tolerance
        rng = np.random.default_rng(config.seed)

        cases = []
        for index in range(config.samples):
            m = self.manifold(keys[index % len(keys)])
            t = float(rng.uniform(*config.time_range))
            level = self._leading_levels(m, config.max_level + 1)[int(rng.integers(0, config.max_level + 1))]
            mode = int(rng.integers(0, level.multiplicity))
            cases.append((m, t, level, mode))

        def compare(case: tuple[ManifoldModel, float, EigenLevel, int]) -> tuple[float, float]:
            m, t, level, mode = case
            started = time.perf_counter()
            cutoff = self.cutoff(m, config)
            radial = multiplier(m, cutoff, t, level, budget=budget, tolerance=quad_tolerance)
            dense = dense_multiplier(m, cutoff, t, level, mode=mode, budget=config.dense_budget)
            return abs(radial - dense), (time.perf_counter() - started) * 1000.0

        measured = self._map(compare, cases)
        for (m, t, level, _), (gap, elapsed) in zip(cases, measured):
            outcome.rows.append(
                ResultRow(
                    manifold=m.key,
                    t=t,
                    N=level.index,
                    E_policy="oracle",
                    E_effective=level.energy,
                    l2_error=gap,
                    runtime_ms=self._runtime(config, elapsed),
                )
            )
        worst = max(gap for gap, _ in measured)
        outcome.fitted["max_gap"] = worst
        outcome.check("oracle_agreement", worst <= tolerance, observed=worst, tolerance=tolerance)

    def _spectral_check(self, config: ExperimentConfig, outcome: StudyOutcome) -> None:
        m = self.manifold(config.manifold)
        energy = config.energy_max
        tolerance = config.tolerance or ORTHONORMALITY_TOLERANCE
        f = SpectralState.random(m, energy, config.seed)

        orthonormality = orthonormality_defect(m, energy)
        outcome.check("orthonormality", orthonormality <= tolerance, observed=orthonormality, tolerance=tolerance)

        t1, t2 = config.t, 0.5 * config.t + 0.25
        composed = exact_propagate(m, t1, exact_propagate(m, t2, f))
        direct = exact_propagate(m, t1 + t2, f)
        group = float(np.max(np.abs(composed.coefficients - direct.coefficients)))
        outcome.check("group_law", group <= GROUP_LAW_TOLERANCE, observed=group, tolerance=GROUP_LAW_TOLERANCE)

        half = 0.5 * energy
        once = project(f, half)
        twice = project(once, half)
        outcome.check(
            "projector_idempotent",
            bool(np.array_equal(once.coefficients, twice.coefficients)),
            detail="rho(E) applied twice equals rho(E) exactly",
        )

        points, weights = spectral_grid(m, energy)
        grid_norm = math.sqrt(float(np.sum(weights * np.abs(f.evaluate(points)) ** 2)))
        parseval = abs(grid_norm - f.norm())
        outcome.check("parseval", parseval <= PARSEVAL_TOLERANCE, observed=parseval, tolerance=PARSEVAL_TOLERANCE)

        for name, value in (
            ("orthonormality", orthonormality),
            ("group_law", group),
            ("parseval", parseval),
        ):
            outcome.fitted[name] = value
            outcome.rows.append(
                ResultRow(
                    manifold=m.key,
                    t=config.t,
                    N=0,
                    E_policy=name,
                    E_effective=energy,
                    l2_error=value,
                    runtime_ms=0.0,
                )
            )


def run(config: ExperimentConfig, settings: LabSettings | None = None) -> ExperimentReport:
    """Run one experiment with a fresh service."""

    return ExperimentService(settings).run(config)


__all__ = ["ExperimentService", "StudyOutcome", "environment_info", "run"]
