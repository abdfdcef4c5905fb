# foundry/actions/experiment_actions.py
"""
Actions for the Monte Carlo commands.

Each action prepares the LabSetup from the injected Settings (truncation cap,
grid sizes, worker count) and hands it to the experiment runner.
"""
import logging

from src.core.config import Settings
from src.event_bus import EventBus
from src.schemas.experiment import ExperimentConfig, ExperimentReport
from src.services.experiments import (
    build_setup,
    run_band,
    run_bk_general_experiment,
    run_bk_uniform_experiment,
    run_coverage_experiment,
    run_empirical_reduction_experiment,
    run_lil_tracker,
    run_quantile_gap_experiment,
    run_reduction_experiment,
    run_reduction_p2_experiment,
    run_subordinated_comparison,
    run_trimmed_mean_test,
    run_weak_convergence_experiment,
)

logger = logging.getLogger(__name__)


def reduce_quantiles(cfg: ExperimentConfig, event_bus: EventBus, app_settings: Settings) -> ExperimentReport:
    return run_reduction_experiment(cfg, build_setup(cfg, app_settings), event_bus)


def reduce_quantiles_p2(cfg: ExperimentConfig, event_bus: EventBus, app_settings: Settings) -> ExperimentReport:
    return run_reduction_p2_experiment(cfg, build_setup(cfg, app_settings), event_bus)


def reduce_empirical(cfg: ExperimentConfig, event_bus: EventBus, app_settings: Settings) -> ExperimentReport:
    return run_empirical_reduction_experiment(cfg, build_setup(cfg, app_settings), event_bus)


def compare_quantile_gap(cfg: ExperimentConfig, event_bus: EventBus, app_settings: Settings) -> ExperimentReport:
    return run_quantile_gap_experiment(cfg, build_setup(cfg, app_settings), event_bus)


def bahadur_kiefer_uniform(cfg: ExperimentConfig, event_bus: EventBus, app_settings: Settings) -> ExperimentReport:
    return run_bk_uniform_experiment(cfg, build_setup(cfg, app_settings), event_bus)


def bahadur_kiefer_general(cfg: ExperimentConfig, event_bus: EventBus, app_settings: Settings) -> ExperimentReport:
    return run_bk_general_experiment(cfg, build_setup(cfg, app_settings), event_bus)


def weak_limits(cfg: ExperimentConfig, event_bus: EventBus, app_settings: Settings) -> ExperimentReport:
    return run_weak_convergence_experiment(cfg, build_setup(cfg, app_settings), event_bus)


def track_lil(cfg: ExperimentConfig, event_bus: EventBus, app_settings: Settings) -> ExperimentReport:
    return run_lil_tracker(cfg, build_setup(cfg, app_settings), event_bus)


def trimmed_mean(cfg: ExperimentConfig, event_bus: EventBus, app_settings: Settings) -> ExperimentReport:
    return run_trimmed_mean_test(cfg, build_setup(cfg, app_settings), event_bus)


def confidence_band(cfg: ExperimentConfig, event_bus: EventBus, app_settings: Settings) -> ExperimentReport:
    return run_band(cfg, build_setup(cfg, app_settings), event_bus)


def band_coverage(cfg: ExperimentConfig, event_bus: EventBus, app_settings: Settings) -> ExperimentReport:
    return run_coverage_experiment(cfg, build_setup(cfg, app_settings), event_bus)


def subordination_contrast(cfg: ExperimentConfig, event_bus: EventBus, app_settings: Settings) -> ExperimentReport:
    return run_subordinated_comparison(cfg, build_setup(cfg, app_settings), event_bus)
