# src/api/cli.py
"""
Command-line front end.

    python -m src.main reduce beta=0.65 replications=200 --n_grid 2^10..2^16
    python -m src.main --config run.cfg --seed 7
    python -m src.main --config lrdlab_output/reduce.csv   # rerun from a parameter echo

A config file holds `key=value` lines; a line `# {json}` (the first line of
every output file) is read as a parameter echo. Flags override key=value
tokens, which override the file.
"""
import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from src.core.config import Settings, settings as default_settings
from src.core.errors import BoundaryCaseError, ConfigError, LabError
from src.event_bus import EventBus
from src.schemas.experiment import ExperimentConfig, RunConfig
from src.services.rates import is_boundary

logger = logging.getLogger(__name__)

ECHO_ONLY_KEYS = ("derived",)
SETTINGS_DEFAULTS = ("mu", "c0", "grid_size", "tail_depth", "workers")
_TRUE = {"1", "true", "yes", "on"}


def _as_bool(value: Any) -> bool:
    return value if isinstance(value, bool) else str(value).strip().lower() in _TRUE


def read_config_file(path: Path) -> Dict[str, Any]:
    """key=value lines and `# {json}` echo lines; reading stops at the first other line (a CSV header)."""
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    values: Dict[str, Any] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if line.startswith("# {"):
            try:
                echo = json.loads(line[2:])
            except json.JSONDecodeError as e:
                raise ConfigError(f"{path}:{lineno}: malformed parameter echo ({e})") from e
            for key in ECHO_ONLY_KEYS:
                echo.pop(key, None)
            values.update(echo)
        elif not line or line.startswith("#"):
            continue
        elif "=" in line:
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
        else:
            break
    return values


def split_tokens(tokens: Sequence[str]) -> Tuple[Optional[str], Dict[str, str]]:
    """A bare first token is the command; the rest must be key=value."""
    command = None
    values: Dict[str, str] = {}
    for i, token in enumerate(tokens):
        if "=" in token:
            key, value = token.split("=", 1)
            values[key.strip()] = value.strip()
        elif i == 0:
            command = token
        else:
            raise ConfigError(f"expected key=value, got '{token}'")
    return command, values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lrdlab",
        allow_abbrev=False,
        description="Monte Carlo lab for quantile and Bahadur-Kiefer processes of long-memory linear sequences.",
    )
    parser.add_argument("tokens", nargs="*", help="command name followed by key=value pairs")
    parser.add_argument("--config", type=Path, help="key=value file or an output file carrying a parameter echo")
    parser.add_argument("--command", dest="command", help="command to run (same as the first token)")
    parser.add_argument("--output_dir", "--output-dir", dest="output_dir", help="directory for CSV and summary files")
    parser.add_argument("--no-csv", dest="emit_csv", action="store_false", default=None, help="skip CSV output")
    parser.add_argument("--no-summary", dest="emit_summary", action="store_false", default=None,
                        help="skip the summary file")
    keys = parser.add_argument_group("experiment keys")
    for name, field in ExperimentConfig.model_fields.items():
        flags = [f"--{name}"]
        if "_" in name:
            flags.append(f"--{name.replace('_', '-')}")
        keys.add_argument(*flags, dest=name, default=None, help=field.description or f"config key '{name}'")
    return parser


def _merge(file_values: Dict[str, Any], token_values: Dict[str, Any], flag_values: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(file_values)
    merged.update(token_values)
    merged.update({k: v for k, v in flag_values.items() if v is not None})
    return merged


def _validation_message(error: ValidationError) -> str:
    parts = []
    for err in error.errors():
        loc = ".".join(str(x) for x in err["loc"]) or "config"
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def _ensure_writable(path: Path) -> Path:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigError(f"cannot create output directory {path}: {e}") from e
    if not os.access(path, os.W_OK):
        raise ConfigError(f"output directory is not writable: {path}")
    return path


def parse_config(argv: Optional[Sequence[str]] = None, app_settings: Optional[Settings] = None,
                 commands: Optional[Iterable[str]] = None) -> RunConfig:
    """
    Builds a validated RunConfig from argv.

    Raises ConfigError for unknown keys, invalid values, unknown commands or
    an unwritable output directory, and BoundaryCaseError when an explicit
    p meets (p+1)(2beta-1) = 1.
    """
    s = app_settings or default_settings
    args = build_parser().parse_intermixed_args(list(argv) if argv is not None else None)
    file_values = read_config_file(args.config) if args.config else {}
    token_command, token_values = split_tokens(args.tokens)
    flag_values = {k: v for k, v in vars(args).items() if k not in ("tokens", "config")}
    merged = _merge(file_values, token_values, flag_values)
    if token_command is not None:
        merged["command"] = token_command

    command = merged.pop("command", None)
    if not command:
        raise ConfigError("no command given")
    known = set(commands) if commands is not None else None
    if known is not None and command not in known:
        raise ConfigError(f"unknown command '{command}'; known: {', '.join(sorted(known))}")

    output_dir = Path(merged.pop("output_dir", None) or s.output_dir)
    emit_csv = _as_bool(merged.pop("emit_csv", True))
    emit_summary = _as_bool(merged.pop("emit_summary", True))

    unknown = sorted(set(merged) - set(ExperimentConfig.model_fields))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    explicit = sorted(merged)
    for key in SETTINGS_DEFAULTS:
        if merged.get(key) is None:
            merged[key] = getattr(s, key)
    try:
        experiment = ExperimentConfig(**merged)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {_validation_message(e)}") from e

    if "p" in explicit and experiment.p is not None and is_boundary(experiment.beta, experiment.p):
        raise BoundaryCaseError(experiment.beta, experiment.p)

    run = RunConfig(command=command, experiment=experiment, output_dir=_ensure_writable(output_dir),
                    emit_csv=emit_csv, emit_summary=emit_summary, explicit_keys=explicit)
    logger.debug(f"Parsed run config: {run.command} with explicit keys {explicit}")
    return run


def _log_batch(event) -> None:
    logger.info(f"{event.experiment}: n={event.n} done ({event.replications} replications, "
                f"{event.elapsed_seconds:.1f}s)")


def _log_written(event) -> None:
    logger.debug(f"report file {event.path} ({event.kind})")


def _log_finished(event) -> None:
    failed = [name for name, ok in event.checks.items() if not ok]
    if failed:
        logger.warning(f"{event.experiment}: {len(failed)} of {len(event.checks)} checks failed: {', '.join(failed)}")
    else:
        logger.info(f"{event.experiment}: all {len(event.checks)} checks passed")


def attach_listeners(bus: EventBus) -> None:
    """Logs experiment progress, outcomes and written files."""
    bus.subscribe("replication_batch_finished", _log_batch)
    bus.subscribe("experiment_finished", _log_finished)
    bus.subscribe("report_written", _log_written)


def main(argv: Optional[List[str]] = None) -> int:
    from src.dependencies import get_command_handler, get_event_bus
    from src.services.view_formatter import format_as_box

    handler = get_command_handler()
    argv = sys.argv[1:] if argv is None else argv
    if not argv or argv[0] in ("help", "commands"):
        print(handler.help_text())
        return 0
    try:
        run = parse_config(argv, commands=handler.foundry.command_ids)
    except LabError as e:
        logger.error(f"Configuration rejected: {e}")
        print(format_as_box("Configuration Error", f"{type(e).__name__}: {e}"), file=sys.stderr)
        return 2
    attach_listeners(get_event_bus())
    return handler.dispatch(run)
