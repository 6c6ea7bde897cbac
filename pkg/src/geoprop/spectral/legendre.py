"""Legendre recurrences for zonal profiles and real spherical harmonics."""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import ArrayLike, NDArray


def legendre_polynomials(degree: int, x: ArrayLike) -> NDArray[np.float64]:
    """P_0(x), ..., P_degree(x) stacked along a new leading axis.

    Uses Bonnet's recurrence (l+1) P_{l+1} = (2l+1) x P_l - l P_{l-1}.
    """

    values = np.asarray(x, dtype=np.float64)
    out = np.empty((degree + 1, *values.shape), dtype=np.float64)
    out[0] = 1.0
    if degree >= 1:
        out[1] = values
    for l in range(1, degree):
        out[l + 1] = ((2 * l + 1) * values * out[l] - l * out[l - 1]) / (l + 1)
    return out


def normalized_associated_legendre(degree: int, theta: ArrayLike) -> NDArray[np.float64]:
    """Orthonormal associated Legendre functions Q[l, m](cos theta) for 0 <= m <= l <= degree.

    Normalized so that Q[l, m] * exp(i m phi) is an orthonormal spherical
    harmonic on the unit sphere; entries with m > l are zero.
    """

    angle = np.asarray(theta, dtype=np.float64)
    x = np.cos(angle)
    s = np.sin(angle)

    q = np.zeros((degree + 1, degree + 1, *angle.shape), dtype=np.float64)
    q[0, 0] = 1.0 / math.sqrt(4.0 * math.pi)

    for m in range(1, degree + 1):
        q[m, m] = math.sqrt((2 * m + 1) / (2 * m)) * s * q[m - 1, m - 1]

    for m in range(0, degree):
        q[m + 1, m] = math.sqrt(2 * m + 3) * x * q[m, m]

    for m in range(0, degree + 1):
        for l in range(m + 2, degree + 1):
            a_lm = math.sqrt((4 * l * l - 1) / (l * l - m * m))
            b_lm = math.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
            q[l, m] = a_lm * (x * q[l - 1, m] - b_lm * q[l - 2, m])

    return q


__all__ = ["legendre_polynomials", "normalized_associated_legendre"]
