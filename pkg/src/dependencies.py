# src/dependencies.py
import logging
from typing import Callable, Optional

from src.core.config import settings
from src.event_bus import EventBus
from src.foundry import FoundryManager
from src.services.command_handler import CommandHandler
from src.services.report_service import ReportService

logger = logging.getLogger(__name__)

# --- SINGLETON INSTANCES ---
# Created once per process and shared by every command.
event_bus = EventBus()
foundry_manager = FoundryManager()
report_service = ReportService(event_bus)
# --- END SINGLETONS ---


def get_foundry_manager() -> FoundryManager:
    """Provides the shared FoundryManager singleton."""
    return foundry_manager


def get_event_bus() -> EventBus:
    """Provides the shared EventBus singleton."""
    return event_bus


def get_report_service() -> ReportService:
    return report_service


def get_command_handler(display_callback: Optional[Callable[[str], None]] = None) -> CommandHandler:
    """A CommandHandler wired to the singletons and the environment settings."""
    return CommandHandler(foundry_manager, event_bus, report_service, settings,
                          display_callback=display_callback or print)
