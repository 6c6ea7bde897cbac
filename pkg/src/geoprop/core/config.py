"""Laboratory configuration settings."""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path
from typing import Annotated, Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class LabSettings(BaseSettings):
    """Base settings for the geoprop laboratory."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="GEOPROP_",
    )

    log_level: Annotated[
        str, Field(default="INFO", description="Application log level")
    ]
    log_json: Annotated[
        bool, Field(default=True, description="Emit JSON log records")
    ]

    oscillation_budget: Annotated[
        int,
        Field(
            default=16,
            description="Quadrature points per phase wavelength",
            ge=8,
        ),
    ]
    quadrature_tolerance: Annotated[
        float,
        Field(
            default=1e-10,
            description="Accepted refinement disagreement for radial quadrature",
            gt=0,
        ),
    ]

    cutoff_support: Annotated[
        float,
        Field(
            default=0.8,
            description="Cutoff support radius as a fraction of the injectivity radius",
            gt=0,
            lt=1,
        ),
    ]
    cutoff_plateau: Annotated[
        float,
        Field(
            default=0.4,
            description="Cutoff plateau radius as a fraction of the injectivity radius",
            gt=0,
            lt=1,
        ),
    ]
    rho_epsilon: Annotated[
        float,
        Field(
            default=0.1,
            description="Exponent margin for the rho(N^(1/alpha - eps)) projector policy",
            gt=0,
        ),
    ]

    output_dir: Annotated[
        Path, Field(default=Path("results"), description="Default result directory")
    ]

    cache_url: Annotated[
        Optional[str],
        Field(default=None, description="Redis URL for the multiplier-table cache"),
    ]
    cache_ttl: Annotated[
        int,
        Field(
            default=86400,
            description="Multiplier-table cache TTL in seconds",
            gt=0,
        ),
    ]
    cache_max_entries: Annotated[
        int,
        Field(
            default=256,
            description="Tables kept by the in-process cache when Redis is not configured",
            gt=0,
        ),
    ]

    workers: Annotated[
        int,
        Field(default=1, description="Parallel workers for independent cells", ge=1),
    ]


@lru_cache
def get_settings() -> LabSettings:
    """Return cached laboratory settings."""
    return LabSettings()


__all__ = ["LabSettings", "get_settings"]
