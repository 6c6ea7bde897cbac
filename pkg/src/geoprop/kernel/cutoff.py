"""Smooth radial cutoff chi: 1 on the plateau, 0 beyond the support."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from geoprop.core.errors import ConfigError, GeometryError
from geoprop.geometry import ManifoldModel


def _flat_exp(s: NDArray[np.float64], sharpness: float) -> NDArray[np.float64]:
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        return np.where(s > 0, np.exp(-sharpness / np.where(s > 0, s, 1.0)), 0.0)


@dataclass(frozen=True, slots=True)
class CutoffProfile:
    """C-infinity bump glued from exp(-sharpness/s) between plateau and support."""

    plateau: float
    support: float
    sharpness: float = 1.0

    def __post_init__(self) -> None:
        if not (0 < self.plateau < self.support and math.isfinite(self.support)):
            raise GeometryError(
                code="cutoff.radii",
                message="Cutoff requires 0 < plateau < support.",
                details={"plateau": self.plateau, "support": self.support},
            )
        if not self.sharpness > 0:
            raise GeometryError(
                code="cutoff.sharpness",
                message="Cutoff sharpness must be positive.",
                details={"sharpness": self.sharpness},
            )

    @classmethod
    def for_manifold(
        cls,
        m: ManifoldModel,
        support_fraction: float = 0.8,
        plateau_fraction: float = 0.4,
        sharpness: float = 1.0,
    ) -> CutoffProfile:
        """Cutoff with radii given as fractions of the injectivity radius."""

        if not 0 < support_fraction < 1:
            raise ConfigError(
                field="cutoff_support",
                message="must lie strictly between 0 and 1",
                details={"value": support_fraction},
            )
        if not 0 < plateau_fraction < support_fraction:
            raise ConfigError(
                field="cutoff_plateau",
                message="must lie strictly between 0 and cutoff_support",
                details={"value": plateau_fraction},
            )
        radius = m.injectivity_radius
        return cls(plateau_fraction * radius, support_fraction * radius, sharpness)

    @property
    def width(self) -> float:
        return self.support - self.plateau

    def __call__(self, r: ArrayLike) -> NDArray[np.float64]:
        s = (np.asarray(r, dtype=np.float64) - self.plateau) / self.width
        s = np.clip(s, 0.0, 1.0)
        rising = _flat_exp(1.0 - s, self.sharpness)
        falling = _flat_exp(s, self.sharpness)
        return rising / (rising + falling)

    def to_dict(self) -> dict[str, Any]:
        return {"plateau": self.plateau, "support": self.support, "sharpness": self.sharpness}


__all__ = ["CutoffProfile"]
