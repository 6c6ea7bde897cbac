from __future__ import annotations

import json
import logging

from geoprop.core.config import LabSettings
from geoprop.core.logging import LabJsonFormatter, build_logging_config


def test_json_formatter_orders_standard_fields_first():
    formatter = LabJsonFormatter("%(message)s")
    record = logging.LogRecord("geoprop.test", logging.INFO, __file__, 1, "table_built", None, None)
    record.manifold = "sphere2:1"

    payload = json.loads(formatter.format(record))

    assert list(payload)[:4] == ["level", "timestamp", "logger", "message"]
    assert payload["level"] == "INFO"
    assert payload["message"] == "table_built"
    assert payload["manifold"] == "sphere2:1"


def test_logging_config_writes_to_stderr():
    config = build_logging_config(LabSettings(_env_file=None, log_level="debug"))

    handler = config["handlers"]["default"]
    assert handler["stream"] == "ext://sys.stderr"
    assert handler["formatter"] == "json"
    assert config["loggers"]["geoprop"]["level"] == "DEBUG"


def test_plain_formatter_when_json_disabled():
    config = build_logging_config(LabSettings(_env_file=None, log_json=False))

    assert config["handlers"]["default"]["formatter"] == "plain"
