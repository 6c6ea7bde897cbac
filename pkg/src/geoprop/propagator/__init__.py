from __future__ import annotations

from .rates import RateFit, fit_rate
from .slicing import (
    ConvergenceRecord,
    ProjectorPolicy,
    SlicingPlan,
    alpha,
    convergence_study,
    identity_defect,
    product_bound,
    single_step_error,
    sliced_apply,
    step_table,
    unitarity_defect,
)

__all__: list[str] = [
    "ConvergenceRecord",
    "ProjectorPolicy",
    "RateFit",
    "SlicingPlan",
    "alpha",
    "convergence_study",
    "fit_rate",
    "identity_defect",
    "product_bound",
    "single_step_error",
    "sliced_apply",
    "step_table",
    "unitarity_defect",
]
