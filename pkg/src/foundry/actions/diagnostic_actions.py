# foundry/actions/diagnostic_actions.py
"""
Actions for the deterministic commands. None of them draws more than one path.
"""
import logging

from src.core.config import Settings
from src.event_bus import EventBus
from src.schemas.experiment import ExperimentConfig, ExperimentReport
from src.services.experiments.diagnostics import run_cbp, run_covcheck, run_rates, run_simulate

logger = logging.getLogger(__name__)


def simulate_path(cfg: ExperimentConfig, event_bus: EventBus, app_settings: Settings) -> ExperimentReport:
    """Samples replication 0 of length n and returns it as the `path` table."""
    return run_simulate(cfg, event_bus, app_settings)


def check_covariances(cfg: ExperimentConfig, event_bus: EventBus, app_settings: Settings) -> ExperimentReport:
    return run_covcheck(cfg, event_bus, app_settings)


def tabulate_rates(cfg: ExperimentConfig, event_bus: EventBus, app_settings: Settings) -> ExperimentReport:
    if cfg.p is None:
        logger.info("rates: p not given, using p=1")
    return run_rates(cfg, event_bus, app_settings)


def evaluate_lil_constant(cfg: ExperimentConfig, event_bus: EventBus) -> ExperimentReport:
    return run_cbp(cfg, event_bus)
