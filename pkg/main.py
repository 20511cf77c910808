#!/usr/bin/env python3
"""
Rydberg Mode-Shaping Simulator
Command-line entry point: loads a scenario, runs one command and writes its
artifacts. Logs go to stderr; stdout carries a single JSON result or error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import structlog
from pydantic import ValidationError

# Add project root to path
project_root = Path(__file__).parent
sys.path.append(str(project_root))

from config.scenario import PRESETS, ScenarioConfig, get_preset, load_scenario_from_file  # noqa: E402
from config.settings import Settings, get_settings, validate_configuration  # noqa: E402
from physics.errors import ParameterValidationError, SimulationError  # noqa: E402
from physics.gate_protocol import ModeSet  # noqa: E402
from runners.orchestrator import RunnerOrchestrator  # noqa: E402
from storage.artifacts import ArtifactStore, to_jsonable  # noqa: E402

EXIT_SUCCESS = 0
EXIT_FAILURE = 1
EXIT_VALIDATION = 2
EXIT_IO = 4

# preset used when neither --config nor --preset is given
DEFAULT_PRESETS = {
    "equilibrium": "bare-chain",
    "modes": "bare-chain",
    "gate-scan": "four-rydberg",
    "delay-scan": "four-rydberg",
    "dressing": "four-rydberg",
    "reproduce-paper": "four-rydberg",
}


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="main.py",
        description="Mode shaping of trapped-ion chains by Rydberg excitation.",
    )
    parser.add_argument("command", choices=RunnerOrchestrator.commands(), help="What to compute.")
    parser.add_argument("--config", help="Scenario file (.json, .yml or .yaml).")
    parser.add_argument(
        "--preset",
        choices=sorted(PRESETS),
        help="Built-in scenario used when --config is not given.",
    )
    parser.add_argument("--out", help="Output directory (default: scenario output_dir, then OUTPUT_DIR).")
    parser.add_argument("--threads", type=int, help="Worker threads for parameter sweeps.")
    parser.add_argument(
        "--mode-set",
        choices=[m.value for m in ModeSet],
        help="Modes entering the gate: every shaped mode, only the localized ones, or the unshaped chain.",
    )
    return parser.parse_args(argv)


def configure_logging(settings: Settings) -> None:
    """stdlib logging to stderr with structlog rendering on top"""
    level = getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(message)s", force=True)

    renderer = (
        structlog.processors.JSONRenderer()
        if settings.LOG_FORMAT == "json"
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            renderer,
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=False,
    )


def load_scenario(args: argparse.Namespace) -> ScenarioConfig:
    if args.config:
        scenario = load_scenario_from_file(args.config)
    else:
        scenario = get_preset(args.preset or DEFAULT_PRESETS[args.command])
    if args.mode_set:
        scenario = scenario.model_copy(update={"mode_set": ModeSet(args.mode_set)})
    return scenario


def error_payload(error: BaseException) -> Dict[str, Any]:
    """Machine-readable description of a failed run"""
    if isinstance(error, SimulationError):
        payload = error.to_dict()
    elif isinstance(error, ValidationError):
        payload = {
            "error": "ValidationError",
            "message": f"{error.error_count()} validation error(s) in the scenario",
            "exit_code": EXIT_VALIDATION,
            "details": {
                "errors": [
                    {"loc": [str(part) for part in item["loc"]], "msg": item["msg"], "type": item["type"]}
                    for item in error.errors()
                ]
            },
        }
    elif isinstance(error, OSError):
        payload = {
            "error": type(error).__name__,
            "message": str(error),
            "exit_code": EXIT_IO,
            "details": {"filename": getattr(error, "filename", None)},
        }
    else:
        payload = {
            "error": type(error).__name__,
            "message": str(error),
            "exit_code": EXIT_FAILURE,
            "details": {},
        }
    return {"status": "error", **payload}


def emit(payload: Dict[str, Any]) -> None:
    print(json.dumps(to_jsonable(payload), indent=2, sort_keys=True))


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command; returns the process exit code"""
    args = parse_args(argv)
    settings = get_settings()
    if args.threads is not None:
        settings = settings.model_copy(update={"DEFAULT_THREADS": args.threads})
    configure_logging(settings)
    logger = structlog.get_logger("main")

    out_dir = args.out or settings.OUTPUT_DIR
    try:
        try:
            validate_configuration(settings)
        except ValueError as e:
            raise ParameterValidationError(str(e)) from e

        scenario = load_scenario(args)
        out_dir = args.out or scenario.output_dir or settings.OUTPUT_DIR
        logger.info(
            f"Starting {settings.APP_NAME} v{settings.VERSION}",
            command=args.command,
            scenario=scenario.name,
            out=out_dir,
        )

        store = ArtifactStore(settings, out_dir)
        store.initialize()
        store.write_json(scenario.model_dump(mode="json"), "scenario.json")

        orchestrator = RunnerOrchestrator(settings, store)
        result = orchestrator.run(args.command, scenario)
        emit(result.to_dict())
        return EXIT_SUCCESS

    except Exception as e:
        payload = error_payload(e)
        logger.error("Command failed", command=args.command, error=str(e), exit_code=payload["exit_code"])
        emit(payload)
        try:
            ArtifactStore(settings, out_dir).write_json(payload, "error.json")
        except OSError:
            logger.warning("Could not write error.json", out=str(out_dir))
        return int(payload["exit_code"])


if __name__ == "__main__":
    sys.exit(main())
