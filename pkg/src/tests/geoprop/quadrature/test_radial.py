from __future__ import annotations

import numpy as np
import pytest

from geoprop.core.errors import DomainError, QuadratureConvergenceError, UsageError
from geoprop.quadrature import (
    MultiplierTable,
    MultiplierTableBuilder,
    RadialRule,
    multiplier,
    multiplier_table,
    operator_norm_estimate,
    table_key,
)
from geoprop.quadrature.radial import composite_gauss_legendre, multiplier_values
from geoprop.repositories import MultiplierCache
from geoprop.spectral import SpectralState, eigenlevels


def test_composite_rule_is_exact_for_polynomials():
    nodes, weights = composite_gauss_legendre(np.linspace(0.0, 3.0, 4), 4)

    assert np.sum(weights * nodes**5) == pytest.approx(3.0**6 / 6.0)
    assert nodes.size == 12


def test_rule_covers_support_with_wavelength_panels(sphere_cutoff):
    coarse = RadialRule.build(sphere_cutoff, 0.1, budget=8)
    refined = RadialRule.build(sphere_cutoff, 0.1, budget=8, refinement=1)

    assert coarse.nodes.max() < sphere_cutoff.support
    assert coarse.weights.sum() == pytest.approx(sphere_cutoff.support)
    assert refined.panels == tuple(2 * p for p in coarse.panels)
    assert coarse.size == 8 * sum(coarse.panels)


def test_smaller_time_needs_more_panels(circle_cutoff):
    slow = RadialRule.build(circle_cutoff, 0.5)
    fast = RadialRule.build(circle_cutoff, 0.01)

    assert sum(fast.panels) > sum(slow.panels)


def test_budget_below_minimum_is_rejected(circle_cutoff):
    with pytest.raises(DomainError):
        RadialRule.build(circle_cutoff, 0.1, budget=4)


def test_circle_multiplier_matches_free_phase(circle, circle_cutoff):
    t = 0.02
    level = eigenlevels(circle, 1.0)[1]

    value = multiplier(circle, circle_cutoff, t, level)

    assert abs(value - np.exp(-0.5j * t)) <= t**2


def test_constant_mode_multiplier_is_near_one(sphere, sphere_cutoff):
    level = eigenlevels(sphere, 0.0)[0]

    value = multiplier(sphere, sphere_cutoff, 0.005, level)

    # U(t) 1 = exp(-i t R / 12) up to O(t^2)
    assert abs(value - np.exp(-0.5j * 0.005 * 2.0 / 6.0)) <= 1e-3


def test_refinement_trace_reports_estimates(torus, torus_cutoff):
    levels = eigenlevels(torus, 2.0)

    values, trace = multiplier_values(torus, torus_cutoff, 0.3, levels)

    assert values.shape == (3,)
    assert trace[0]["refinement"] == 0
    assert trace[-1]["estimate"] <= 1e-10


def test_no_refinement_budget_raises_with_trace(circle, circle_cutoff):
    levels = eigenlevels(circle, 1.0)

    with pytest.raises(QuadratureConvergenceError) as excinfo:
        multiplier_values(circle, circle_cutoff, 0.1, levels, max_refinements=0)

    assert excinfo.value.trace[0]["refinement"] == 0
    assert excinfo.value.exit_code == 3


def test_table_power_and_apply(circle, circle_cutoff):
    table = multiplier_table(circle, circle_cutoff, 0.05, 4.0)
    f = SpectralState.random(circle, 4.0, 0)

    squared = table.power(2)
    twice = table.apply(table.apply(f))

    assert squared.steps == 2
    assert np.allclose(squared.apply(f).coefficients, twice.coefficients)
    assert np.allclose(table.power(5).values, table.values**5)


def test_table_power_rejects_zero(circle, circle_cutoff):
    with pytest.raises(DomainError):
        multiplier_table(circle, circle_cutoff, 0.05, 1.0).power(0)


def test_table_must_cover_state(circle, sphere, circle_cutoff):
    table = multiplier_table(circle, circle_cutoff, 0.05, 1.0)

    with pytest.raises(UsageError):
        table.apply(SpectralState.zeros(circle, 4.0))
    with pytest.raises(UsageError):
        table.apply(SpectralState.zeros(sphere, 0.0))


def test_norm_and_defect(circle, circle_cutoff):
    table = multiplier_table(circle, circle_cutoff, 0.05, 16.0)

    assert table.operator_norm() == pytest.approx(np.max(np.abs(table.values)))
    assert table.unitarity_defect(1.0) <= table.unitarity_defect()
    assert table.unitarity_defect() <= 0.05
    assert operator_norm_estimate(circle, circle_cutoff, 0.05, 16.0) == pytest.approx(table.operator_norm())


def test_table_dict_restores_values(sphere, sphere_cutoff):
    table = multiplier_table(sphere, sphere_cutoff, 0.2, 6.0)

    restored = MultiplierTable.from_dict(table.to_dict())

    assert restored.manifold == sphere
    assert restored.cutoff == sphere_cutoff
    assert np.array_equal(restored.values, table.values)


def test_table_key_identifies_inputs(sphere, sphere_cutoff):
    key = table_key(sphere, sphere_cutoff, 0.1, 6.0, 16, 1e-10)

    assert key == table_key(sphere, sphere_cutoff, 0.1, 6.0, 16, 1e-10)
    assert key != table_key(sphere, sphere_cutoff, 0.2, 6.0, 16, 1e-10)
    assert key.startswith("sphere2:1|")


def test_builder_reuses_stored_tables(circle, circle_cutoff):
    cache = MultiplierCache()
    builder = MultiplierTableBuilder(store=cache)

    first = builder.build(circle, circle_cutoff, 0.1, 4.0)
    second = builder.build(circle, circle_cutoff, 0.1, 4.0)

    assert first is second
    assert len(cache) == 1


@pytest.mark.parametrize("t", [0.1, 0.01])
def test_node_spacing_follows_oscillation_budget(sphere_cutoff, t):
    rule = RadialRule.build(sphere_cutoff, t, budget=16)
    transition = rule.nodes[rule.nodes > sphere_cutoff.plateau]

    assert np.max(np.diff(transition)) <= 2 * np.pi * t / (sphere_cutoff.support * 16)


def test_halving_time_doubles_node_count(circle_cutoff):
    ratio = RadialRule.build(circle_cutoff, 0.0005).size / RadialRule.build(circle_cutoff, 0.001).size

    assert ratio == pytest.approx(2.0, rel=0.02)


def test_extended_rule_stays_exact(sphere, sphere_cutoff):
    upper = 0.95 * sphere.injectivity_radius
    rule = RadialRule.build(sphere_cutoff, 0.1, budget=8, upper=upper)

    assert len(rule.panels) == 3
    assert rule.nodes.max() < upper
    assert np.sum(rule.weights * rule.nodes**5) == pytest.approx(upper**6 / 6.0, rel=1e-12)


def test_extending_the_range_leaves_multipliers_unchanged(sphere, sphere_cutoff):
    level = eigenlevels(sphere, 6.0)[2]

    inside = multiplier(sphere, sphere_cutoff, 0.05, level)
    extended = multiplier(sphere, sphere_cutoff, 0.05, level, upper=0.95 * sphere.injectivity_radius)

    assert abs(inside - extended) <= 1e-9


def test_range_beyond_injectivity_radius_is_rejected(sphere, sphere_cutoff):
    level = eigenlevels(sphere, 0.0)[0]

    with pytest.raises(DomainError):
        multiplier(sphere, sphere_cutoff, 0.05, level, upper=sphere.injectivity_radius)


def test_operator_norm_estimate_is_stable_under_node_doubling(torus, torus_cutoff):
    coarse = operator_norm_estimate(torus, torus_cutoff, 0.1, 8.0, budget=16)
    fine = operator_norm_estimate(torus, torus_cutoff, 0.1, 8.0, budget=32)

    assert abs(coarse - fine) <= 1e-9
