from __future__ import annotations

import math
from pathlib import Path

import fakeredis
import pytest

from geoprop.core.config import LabSettings
from geoprop.geometry import Circle, FlatTorus, Sphere2
from geoprop.kernel import CutoffProfile
from geoprop.quadrature import MultiplierTableBuilder
from geoprop.repositories import MultiplierCache, ResultsRepository
from geoprop.services import ExperimentService


@pytest.fixture
def circle() -> Circle:
    return Circle(1.0)


@pytest.fixture
def torus() -> FlatTorus:
    return FlatTorus((2 * math.pi, 2 * math.pi))


@pytest.fixture
def sphere() -> Sphere2:
    return Sphere2(1.0)


@pytest.fixture
def circle_cutoff(circle: Circle) -> CutoffProfile:
    return CutoffProfile.for_manifold(circle)


@pytest.fixture
def torus_cutoff(torus: FlatTorus) -> CutoffProfile:
    return CutoffProfile.for_manifold(torus)


@pytest.fixture
def sphere_cutoff(sphere: Sphere2) -> CutoffProfile:
    return CutoffProfile.for_manifold(sphere)


@pytest.fixture
def builder() -> MultiplierTableBuilder:
    return MultiplierTableBuilder(store=MultiplierCache())


@pytest.fixture
def settings(tmp_path: Path) -> LabSettings:
    return LabSettings(_env_file=None, log_json=False, output_dir=tmp_path / "results")


@pytest.fixture
def fake_redis() -> fakeredis.FakeRedis:
    return fakeredis.FakeRedis(decode_responses=True)


@pytest.fixture
def service(settings: LabSettings, tmp_path: Path) -> ExperimentService:
    return ExperimentService(
        settings,
        cache=MultiplierCache(),
        results=ResultsRepository(tmp_path / "results"),
    )
