from __future__ import annotations

from .multipliers import MultiplierCache
from .results import CSV_COLUMNS, ResultsRepository

__all__: list[str] = [
    "CSV_COLUMNS",
    "MultiplierCache",
    "ResultsRepository",
]
