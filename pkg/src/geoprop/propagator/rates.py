"""Log-log least-squares rate fits."""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from geoprop.core.errors import FitError


@dataclass(frozen=True, slots=True)
class RateFit:
    """y ~ exp(intercept) * x**slope; residual is the RMS misfit in log space."""

    slope: float
    intercept: float
    residual: float

    def within(self, expected: float, tolerance: float) -> bool:
        return abs(self.slope - expected) <= tolerance


def fit_rate(points: Iterable[tuple[float, float]]) -> RateFit:
    pairs = [(float(x), float(y)) for x, y in points]
    if len(pairs) < 3:
        raise FitError(
            code="fit.too_few_points",
            message="A rate fit needs at least 3 points.",
            details={"points": len(pairs)},
        )
    if any(not (x > 0 and y > 0) or not (math.isfinite(x) and math.isfinite(y)) for x, y in pairs):
        raise FitError(
            code="fit.nonpositive",
            message="Rate fits need positive finite coordinates.",
            details={"points": pairs},
        )

    log_x = np.log([x for x, _ in pairs])
    log_y = np.log([y for _, y in pairs])
    slope, intercept = np.polyfit(log_x, log_y, 1)
    misfit = log_y - (slope * log_x + intercept)
    return RateFit(
        slope=float(slope),
        intercept=float(intercept),
        residual=float(np.sqrt(np.mean(misfit**2))),
    )


__all__ = ["RateFit", "fit_rate"]
