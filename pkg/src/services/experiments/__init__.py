# src/services/experiments/__init__.py
"""
Monte Carlo experiments and deterministic diagnostics.

Every runner takes an ExperimentConfig (plus an optional prepared LabSetup
and EventBus) and returns an ExperimentReport.
"""
from .bahadur_kiefer import run_bk_general_experiment, run_bk_uniform_experiment, run_weak_convergence_experiment
from .bands import quantile_confidence_band, run_band, run_coverage_experiment
from .base import LabSetup, build_setup
from .diagnostics import run_cbp, run_covcheck, run_rates, run_simulate
from .lil import run_lil_tracker
from .reduction import (
    run_empirical_reduction_experiment,
    run_quantile_gap_experiment,
    run_reduction_experiment,
    run_reduction_p2_experiment,
)
from .subordination import run_subordinated_comparison
from .trimmed import run_trimmed_mean_test, trimmed_sum

__all__ = [
    "LabSetup",
    "build_setup",
    "run_simulate",
    "run_covcheck",
    "run_rates",
    "run_cbp",
    "run_reduction_experiment",
    "run_reduction_p2_experiment",
    "run_empirical_reduction_experiment",
    "run_quantile_gap_experiment",
    "run_bk_uniform_experiment",
    "run_bk_general_experiment",
    "run_weak_convergence_experiment",
    "run_lil_tracker",
    "run_trimmed_mean_test",
    "trimmed_sum",
    "run_band",
    "run_coverage_experiment",
    "quantile_confidence_band",
    "run_subordinated_comparison",
]
