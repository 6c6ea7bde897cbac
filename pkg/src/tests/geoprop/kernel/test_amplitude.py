from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from geoprop.core.errors import DomainError, GeometryError, ResolutionError
from geoprop.kernel import (
    CutoffProfile,
    KernelFactors,
    action,
    curvature_limit_check,
    kernel_value,
    phase_prefactor,
    transport_residual,
    van_vleck_sqrt,
)


def test_phase_prefactor_principal_branch():
    assert phase_prefactor(1) == pytest.approx(1 / cmath.sqrt(2j * math.pi))
    assert phase_prefactor(2) == pytest.approx(1 / (2j * math.pi))


def test_action_is_quadratic_in_distance():
    assert action(0.5, np.array([0.0, 1.0, 2.0])) == pytest.approx([0.0, 1.0, 4.0])


@pytest.mark.parametrize("t", [0.0, -1.0])
def test_nonpositive_time_is_rejected(t):
    with pytest.raises(DomainError) as excinfo:
        action(t, 1.0)

    assert excinfo.value.code == "kernel.nonpositive_time"


def test_flat_amplitude_is_free_particle(torus):
    assert van_vleck_sqrt(torus, 0.25, np.array([0.0, 1.0])) == pytest.approx([4.0, 4.0])


def test_sphere_amplitude_grows_toward_cut_locus(sphere):
    a = van_vleck_sqrt(sphere, 1.0, np.array([0.0, 1.0, 2.0]))

    assert a[0] == pytest.approx(1.0)
    assert a[1] == pytest.approx(math.sqrt(1.0 / math.sin(1.0)))
    assert a[2] > a[1] > a[0]


def test_kernel_vanishes_beyond_support(sphere, sphere_cutoff):
    r = np.array([0.1, sphere_cutoff.support, 0.95 * math.pi])

    values = kernel_value(sphere, sphere_cutoff, 0.3, r)

    assert values[0] != 0
    assert values[1] == 0
    assert values[2] == 0


def test_kernel_refuses_radii_past_injectivity(circle, circle_cutoff):
    with pytest.raises(GeometryError):
        kernel_value(circle, circle_cutoff, 0.3, np.array([math.pi]))


def test_kernel_factors_bundle(circle, circle_cutoff):
    factors = KernelFactors.build(circle, circle_cutoff, 0.2)
    r = np.array([0.3])

    expected = factors.prefactor * factors.chi(r) * factors.amplitude(r) * np.exp(1j * factors.action(r))

    assert factors.kernel(r) == pytest.approx(expected)


def test_kernel_factors_reject_support_past_injectivity(circle):
    with pytest.raises(DomainError):
        KernelFactors.build(circle, CutoffProfile(1.0, 4.0), 0.2)


def test_curvature_limit_on_sphere(sphere):
    assert curvature_limit_check(sphere, 1.0) == pytest.approx(1.0 / 3.0, abs=1e-4)


def test_curvature_limit_scales_with_time(sphere):
    assert curvature_limit_check(sphere, 0.5) == pytest.approx(2.0 / 3.0, abs=1e-4)


def test_curvature_limit_on_torus_is_zero(torus):
    assert abs(curvature_limit_check(torus, 1.0)) <= 1e-10


def test_curvature_limit_rejects_coarse_steps(sphere):
    with pytest.raises(ResolutionError):
        curvature_limit_check(sphere, 1.0, h=0.5, tolerance=1e-8)
    with pytest.raises(ResolutionError):
        curvature_limit_check(sphere, 1.0, h=4.0)


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("r", [0.1, 0.7, 2.0])
def test_amplitude_solves_transport_equation(sphere, t, r):
    assert transport_residual(sphere, t, r) < 1e-8


def test_transport_equation_on_torus(torus):
    assert transport_residual(torus, 1.0, 1.5) < 1e-8


def test_transport_residual_needs_room_for_step(sphere):
    with pytest.raises(ResolutionError):
        transport_residual(sphere, 1.0, 1e-6, step=1e-5)


def test_sphere_amplitude_expansion_starts_with_curvature_term(sphere):
    t = 0.5
    r = np.linspace(0.0, 0.6, 61)
    scaled = van_vleck_sqrt(sphere, t, r) * t ** (sphere.dimension / 2)

    coefficients = np.polyfit(r**2, scaled, 3)[::-1]

    assert abs(coefficients[0] - 1.0) <= 1e-4
    assert abs(coefficients[1] - 1.0 / 12.0) <= 1e-4
