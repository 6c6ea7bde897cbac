"""Loading experiment configs from disk and running every acceptance config in a directory."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from geoprop.core.errors import ConfigError
from geoprop.schemas import ExperimentConfig, ExperimentReport

from .experiments import ExperimentService

logger = logging.getLogger(__name__)


def _field_of(exc: ValidationError) -> str:
    errors = exc.errors()
    if not errors:
        return "config"
    if errors[0].get("loc"):
        return ".".join(str(part) for part in errors[0]["loc"])
    # model-level checks name their field in the message
    for word in str(errors[0].get("msg", "")).replace(",", " ").split():
        if word in ExperimentConfig.model_fields:
            return word
    return "config"


def parse_config(data: dict[str, Any]) -> ExperimentConfig:
    """Validate a raw mapping; validation failures name the offending field."""

    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0] if exc.errors() else {"msg": str(exc)}
        raise ConfigError(field=_field_of(exc), message=str(first.get("msg", exc))) from exc


def load_config(path: Path) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(field="config", message=f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(field="config", message=f"{path} is not valid JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(field="config", message=f"{path} must hold a JSON object")
    data.setdefault("name", Path(path).stem)
    return parse_config(data)


def verify_all(
    directory: Path,
    service: ExperimentService | None = None,
    *,
    output_dir: Path | None = None,
) -> list[ExperimentReport]:
    """Run every ``*.json`` config in ``directory`` in filename order."""

    paths = sorted(Path(directory).glob("*.json"))
    if not paths:
        raise ConfigError(field="config", message=f"no experiment configs found in {directory}")

    service = service or ExperimentService()
    reports: list[ExperimentReport] = []
    for path in paths:
        config = load_config(path)
        if output_dir is not None:
            config = config.model_copy(update={"output_dir": output_dir})
        report = service.run(config)
        reports.append(report)
        logger.info("config_verified", extra={"config": path.name, "passed": report.passed})

    logger.info(
        "verify_all_finished",
        extra={
            "configs": len(reports),
            "failed": [report.config.name for report in reports if not report.passed],
        },
    )
    return reports


__all__ = ["load_config", "parse_config", "verify_all"]
