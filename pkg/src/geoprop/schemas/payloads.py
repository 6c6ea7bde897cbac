"""Wire forms of spectral states and multiplier tables; complex numbers are [re, im]."""

from __future__ import annotations

from pydantic import BaseModel, Field


class SpectralStatePayload(BaseModel):
    """Nonzero coefficients as (level, mode, re, im) rows."""

    manifold: str
    E_max: float = Field(ge=0)
    coefficients: list[tuple[int, int, float, float]]


class CutoffPayload(BaseModel):
    plateau: float = Field(gt=0)
    support: float = Field(gt=0)
    sharpness: float = Field(default=1.0, gt=0)


class MultiplierTablePayload(BaseModel):
    """Cached multiplier table keyed by (manifold, cutoff, t, E_max, budget)."""

    manifold: str
    cutoff: CutoffPayload
    t: float = Field(gt=0)
    energy_max: float = Field(ge=0)
    budget: int = Field(ge=8)
    steps: int = Field(default=1, ge=1)
    energies: list[float]
    values: list[tuple[float, float]]


__all__ = ["CutoffPayload", "MultiplierTablePayload", "SpectralStatePayload"]
