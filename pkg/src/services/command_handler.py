# src/services/command_handler.py
import inspect
import logging
from typing import Any, Callable, Dict

from src.core.config import Settings
from src.core.errors import LabError
from src.event_bus import EventBus
from src.foundry import BlueprintInvocation, FoundryManager
from src.schemas.experiment import RunConfig
from .report_service import ReportService
from .view_formatter import format_aggregates, format_as_box, format_checks, format_command_help

logger = logging.getLogger(__name__)

EXIT_PASSED = 0
EXIT_CHECK_FAILED = 1
EXIT_ERROR = 2


class CommandHandler:
    """
    Runs one lab command: looks up its blueprint, injects what the action
    asks for, writes the report and turns the outcome into an exit status.
    """

    def __init__(self, foundry_manager: FoundryManager, event_bus: EventBus, report_service: ReportService,
                 app_settings: Settings, display_callback: Callable[[str], None] = print):
        self.foundry = foundry_manager
        self.event_bus = event_bus
        self.report_service = report_service
        self.settings = app_settings
        self.display = display_callback
        logger.info("CommandHandler initialized and ready.")

    def get_available_commands(self) -> Dict[str, str]:
        return {bp.id: bp.description for bp in self.foundry.blueprints}

    def help_text(self) -> str:
        return format_command_help(self.foundry.blueprints)

    def _service_map(self) -> Dict[str, Any]:
        return {"event_bus": self.event_bus, "app_settings": self.settings}

    def _prepare_parameters(self, action: Callable[..., Any], invocation: BlueprintInvocation) -> Dict[str, Any]:
        """Keeps the invocation parameters and services that appear in the action's signature."""
        sig = inspect.signature(action)
        available = {**invocation.parameters, **self._service_map()}
        return {name: value for name, value in available.items() if name in sig.parameters}

    def dispatch(self, run: RunConfig) -> int:
        """0 when every acceptance check passed, 1 when one failed, 2 on an error."""
        blueprint = self.foundry.get_blueprint(run.command)
        if blueprint is None:
            self.display(format_as_box("Error: Unknown Command",
                                       f"Unknown command: {run.command}\n\n{self.help_text()}"))
            return EXIT_ERROR
        action = self.foundry.get_action(blueprint.action_function_name)
        invocation = BlueprintInvocation(blueprint=blueprint, parameters={"cfg": run.experiment})
        params = self._prepare_parameters(action, invocation)
        logger.info(f"Running '{run.command}' (beta={run.experiment.beta}, seed={run.experiment.seed})")

        try:
            report = action(**params)
        except LabError as e:
            logger.error(f"'{run.command}' failed: {e}")
            self.display(format_as_box(f"Error: {run.command}", f"{type(e).__name__}: {e}"))
            return EXIT_ERROR
        except Exception as e:
            logger.exception(f"An unexpected error occurred while executing '{run.command}'.")
            self.display(format_as_box(f"Error: {run.command}", f"{type(e).__name__}: {e}"))
            return EXIT_ERROR

        written = self.report_service.write(report, run.output_dir, run.command, run.emit_csv, run.emit_summary)
        lines = format_checks(report).split("\n") + [""]
        aggregates = format_aggregates(report)
        if aggregates:
            lines += aggregates + [""]
        lines += [f"wrote {p}" for p in written]
        self.display(format_as_box(f"{run.command}: {'PASSED' if report.passed else 'FAILED'}", lines))
        if not report.passed:
            failed = [c.name for c in report.checks if not c.passed]
            logger.warning(f"'{run.command}' failed acceptance checks: {', '.join(failed)}")
            return EXIT_CHECK_FAILED
        return EXIT_PASSED

