"""Command-line front end for the propagator laboratory."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any

ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from geoprop.core.config import LabSettings, get_settings
from geoprop.core.errors import BaseLabError, ConfigError
from geoprop.core.logging import configure_logging
from geoprop.propagator import ProjectorPolicy
from geoprop.schemas import BoundKind, EmitFormat, ErrorInfo, ErrorResponse, StudyKind, SuccessResponse
from geoprop.services import ExperimentService, parse_config, verify_all

logger = logging.getLogger("geoprop.cli")

VERIFY_ALL = "verify-all"


def _function_term(raw: str) -> dict[str, Any]:
    """``level[:mode[:re[:im]]]`` -> FunctionTerm mapping."""

    parts = raw.split(":")
    try:
        level = int(parts[0])
        mode = int(parts[1]) if len(parts) > 1 and parts[1] else 0
        re_part = float(parts[2]) if len(parts) > 2 else 1.0
        im_part = float(parts[3]) if len(parts) > 3 else 0.0
    except ValueError as exc:
        raise ConfigError(field="function", message=f"cannot parse term {raw!r}") from exc
    if len(parts) > 4:
        raise ConfigError(field="function", message=f"too many components in term {raw!r}")
    return {"level": level, "mode": mode, "amplitude": (re_part, im_part)}


def _add_study_options(parser: argparse.ArgumentParser) -> None:
    # Overrides stay absent from the namespace unless given.
    S = argparse.SUPPRESS
    parser.add_argument("--config", type=Path, default=S, help="JSON experiment config")
    parser.add_argument("--name", default=S)
    parser.add_argument("--manifold", default=S, help="e.g. circle:1, torus:2pi,2pi, sphere2:1")
    parser.add_argument("--manifolds", nargs="+", default=S)
    parser.add_argument("--cutoff-support", type=float, default=S)
    parser.add_argument("--cutoff-plateau", type=float, default=S)
    parser.add_argument("--cutoff-sharpness", type=float, default=S)
    parser.add_argument("--t", type=float, default=S, help="total time")
    parser.add_argument("--times", type=float, nargs="+", default=S)
    parser.add_argument("--slices", type=int, nargs="+", default=S)
    parser.add_argument("--policy", choices=[p.value for p in ProjectorPolicy], default=S)
    parser.add_argument("--energy", type=float, default=S)
    parser.add_argument("--energy-max", type=float, default=S)
    parser.add_argument("--epsilon", type=float, default=S)
    parser.add_argument(
        "--function",
        action="append",
        default=S,
        metavar="LEVEL[:MODE[:RE[:IM]]]",
        help="eigenfunction term, repeatable",
    )
    parser.add_argument("--random-levels", type=int, default=S)
    parser.add_argument("--seed", type=int, default=S)
    parser.add_argument("--no-curvature-term", dest="curvature_term", action="store_false", default=S)
    parser.add_argument("--expected-slope", type=float, default=S)
    parser.add_argument("--slope-tolerance", type=float, default=S)
    parser.add_argument("--bound", choices=[b.value for b in BoundKind], default=S)
    parser.add_argument("--bound-constant", type=float, default=S)
    parser.add_argument("--max-error", type=float, default=S)
    parser.add_argument("--defect-constant", type=float, default=S)
    parser.add_argument("--product-slices", type=int, default=S)
    parser.add_argument("--product-limit", type=float, default=S)
    parser.add_argument("--dimension", type=int, default=S)
    parser.add_argument("--orders", type=int, nargs="+", default=S)
    parser.add_argument("--patch-plateau", type=float, default=S)
    parser.add_argument("--patch-support", type=float, default=S)
    parser.add_argument("--step", type=float, default=S)
    parser.add_argument("--tolerance", type=float, default=S)
    parser.add_argument("--samples", type=int, default=S)
    parser.add_argument("--time-range", type=float, nargs=2, default=S, metavar=("LOW", "HIGH"))
    parser.add_argument("--max-level", type=int, default=S)
    parser.add_argument("--dense-budget", type=int, default=S)
    parser.add_argument("--oscillation-budget", type=int, default=S)
    parser.add_argument("--quadrature-tolerance", type=float, default=S)
    parser.add_argument("--output-dir", type=Path, default=S)
    parser.add_argument("--emit", choices=[e.value for e in EmitFormat], default=S)
    parser.add_argument("--no-runtime", dest="record_runtime", action="store_false", default=S)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geoprop",
        description="Short-time propagator laboratory on circle, flat torus and round sphere",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    for study in StudyKind:
        _add_study_options(commands.add_parser(study.value, help=f"run the {study.value} study"))

    verify = commands.add_parser(VERIFY_ALL, help="run every config in a directory")
    verify.add_argument("directory", nargs="?", type=Path, default=ROOT / "configs")
    verify.add_argument("--output-dir", type=Path, default=None)
    return parser


def parse_args(argv: list[str]) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def config_data(args: argparse.Namespace) -> dict[str, Any]:
    """Merge a config file with command-line overrides; flags win."""

    overrides = {key: value for key, value in vars(args).items() if key not in {"command", "config"}}
    data: dict[str, Any] = {}
    config_path = getattr(args, "config", None)
    if config_path is not None:
        try:
            data = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(field="config", message=f"cannot load {config_path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(field="config", message=f"{config_path} must hold a JSON object")
        data.setdefault("name", Path(config_path).stem)

    declared = data.get("study")
    if declared is not None and declared != args.command:
        raise ConfigError(
            field="study",
            message=f"config declares {declared!r} but the {args.command!r} command was run",
        )
    data["study"] = args.command

    if "function" in overrides:
        overrides["function"] = [_function_term(raw) for raw in overrides["function"]]
    if "time_range" in overrides:
        overrides["time_range"] = tuple(overrides["time_range"])
    data.update(overrides)
    return data


def execute(args: argparse.Namespace, settings: LabSettings) -> SuccessResponse[Any]:
    service = ExperimentService(settings)
    if args.command == VERIFY_ALL:
        reports = verify_all(args.directory, service, output_dir=args.output_dir)
        summary = [
            {
                "name": report.config.name,
                "study": report.config.study.value,
                "passed": report.passed,
                "failed_checks": [check.name for check in report.checks if not check.passed],
                "outputs": report.outputs,
            }
            for report in reports
        ]
        return SuccessResponse[Any](
            command=args.command,
            passed=all(item["passed"] for item in summary),
            data={"reports": summary},
        )

    report = service.run(parse_config(config_data(args)))
    return SuccessResponse[Any](
        command=args.command,
        passed=report.passed,
        data=report.model_dump(mode="json"),
    )


def main(argv: list[str] | None = None, settings: LabSettings | None = None) -> int:
    """Run one command; 0 when every check passed, 1 on failed checks, error exit codes otherwise."""

    args = parse_args(sys.argv[1:] if argv is None else argv)
    settings = settings or get_settings()
    configure_logging(settings)

    try:
        response = execute(args, settings)
    except BaseLabError as exc:
        logger.error(f"{args.command} failed: {exc.code}")
        envelope = ErrorResponse(
            command=args.command,
            error=ErrorInfo(
                code=exc.code,
                message=exc.message,
                exit_code=exc.exit_code,
                details=exc.details,
            ),
        )
        print(envelope.model_dump_json(indent=2), file=sys.stderr)
        return exc.exit_code

    print(response.model_dump_json(indent=2))
    return 0 if response.passed else 1


if __name__ == "__main__":  # pragma: no cover - CLI entrypoint
    sys.exit(main())
