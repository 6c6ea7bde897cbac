"""Atomic CSV and JSON result writers."""

from __future__ import annotations

import csv
import io
import logging
import os
import tempfile
from collections.abc import Iterable
from pathlib import Path

from pydantic import BaseModel

from geoprop.core.errors import RepositoryError
from geoprop.schemas import ResultRow

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("manifold", "t", "N", "E_policy", "E_effective", "l2_error", "runtime_ms")


class ResultsRepository:
    """Writes result files under ``output_dir`` via temp file + rename."""

    def __init__(self, output_dir: Path) -> None:
        self._output_dir = Path(output_dir)

    @property
    def output_dir(self) -> Path:
        return self._output_dir

    def _write_atomic(self, path: Path, text: str) -> Path:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
            try:
                with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
                    handle.write(text)
                os.replace(tmp_name, path)
            except BaseException:
                Path(tmp_name).unlink(missing_ok=True)
                raise
        except OSError as exc:
            raise RepositoryError(
                code="results.write",
                message=f"Failed to write {path}.",
                details={"path": str(path), "error": str(exc)},
            ) from exc
        logger.info("result_file_written", extra={"path": str(path)})
        return path

    @staticmethod
    def render_csv(rows: Iterable[ResultRow]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            values = (getattr(row, column) for column in CSV_COLUMNS)
            writer.writerow([repr(v) if isinstance(v, float) else v for v in values])
        return buffer.getvalue()

    def write_csv(self, name: str, rows: Iterable[ResultRow]) -> Path:
        return self._write_atomic(self._output_dir / f"{name}.csv", self.render_csv(rows))

    def write_json(self, name: str, payload: BaseModel) -> Path:
        text = payload.model_dump_json(indent=2) + "\n"
        return self._write_atomic(self._output_dir / f"{name}.json", text)


__all__ = ["CSV_COLUMNS", "ResultsRepository"]
