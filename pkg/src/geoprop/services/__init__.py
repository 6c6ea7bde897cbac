from __future__ import annotations

from .experiments import ExperimentService, StudyOutcome, environment_info, run
from .verification import load_config, parse_config, verify_all

__all__: list[str] = [
    "ExperimentService",
    "StudyOutcome",
    "environment_info",
    "load_config",
    "parse_config",
    "run",
    "verify_all",
]
