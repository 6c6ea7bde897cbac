from __future__ import annotations

from .dense import DenseGrid, dense_apply, dense_grid, dense_multiplier
from .radial import (
    MultiplierTable,
    MultiplierTableBuilder,
    RadialRule,
    TableStore,
    multiplier,
    multiplier_table,
    operator_norm_estimate,
    table_key,
)
from .stationary_phase import (
    gaussian_laplacian_powers,
    gaussian_patch_exact,
    patch_integral,
    stationary_phase_expansion,
)

__all__: list[str] = [
    "DenseGrid",
    "MultiplierTable",
    "MultiplierTableBuilder",
    "RadialRule",
    "TableStore",
    "dense_apply",
    "dense_grid",
    "dense_multiplier",
    "gaussian_laplacian_powers",
    "gaussian_patch_exact",
    "multiplier",
    "multiplier_table",
    "operator_norm_estimate",
    "patch_integral",
    "stationary_phase_expansion",
    "table_key",
]
