from __future__ import annotations

from pathlib import Path

import pytest
from pydantic import ValidationError

from geoprop.core.config import LabSettings


def test_defaults_match_documented_values():
    settings = LabSettings(_env_file=None)

    assert settings.oscillation_budget == 16
    assert settings.quadrature_tolerance == 1e-10
    assert settings.cutoff_support == 0.8
    assert settings.cutoff_plateau == 0.4
    assert settings.cache_url is None
    assert settings.workers == 1
    assert settings.output_dir == Path("results")


def test_environment_overrides_use_prefix(monkeypatch):
    monkeypatch.setenv("GEOPROP_OSCILLATION_BUDGET", "24")
    monkeypatch.setenv("GEOPROP_LOG_JSON", "false")

    settings = LabSettings(_env_file=None)

    assert settings.oscillation_budget == 24
    assert settings.log_json is False


def test_env_file_is_read(tmp_path):
    env_file = tmp_path / ".env"
    env_file.write_text("GEOPROP_WORKERS=3\nGEOPROP_CACHE_URL=redis://localhost:6379/2\n")

    settings = LabSettings(_env_file=env_file)

    assert settings.workers == 3
    assert settings.cache_url == "redis://localhost:6379/2"


@pytest.mark.parametrize(
    "field, value",
    [("oscillation_budget", 4), ("cutoff_support", 1.2), ("workers", 0), ("quadrature_tolerance", 0.0)],
)
def test_out_of_range_values_are_rejected(field, value):
    with pytest.raises(ValidationError):
        LabSettings(_env_file=None, **{field: value})
