# src/services/experiments/trimmed.py
"""Trimmed sums of order statistics."""
import logging
import math
import time
from typing import Optional

import numpy as np

from src.core.errors import DomainError
from src.event_bus import EventBus
from src.schemas.experiment import ExperimentConfig, ExperimentReport
from src.services.experiments.base import (
    ACROSS_SIZES,
    AGGREGATE,
    LabSetup,
    bound_check,
    build_setup,
    finish,
    record_replications,
    sizes_with,
    sweep,
)
from src.services.processes import EmpiricalState
from src.services.statistics import ks_distance, loglog_slope, normal_cdf

logger = logging.getLogger(__name__)


def trim_level(cfg: ExperimentConfig, n: int) -> float:
    """l_n = n^-trim_value (power rule) or the fixed trim_value."""
    return n ** (-cfg.trim_value) if cfg.trim_rule == "power" else cfg.trim_value


def trimmed_sum(x_sorted: np.ndarray, level: float) -> float:
    """Sum of X_{i:n} for ceil(n l) <= i <= floor(n(1-l)), with the lower index at least 1."""
    if not 0 <= level < 0.5:
        raise DomainError(f"trimming level must lie in [0, 1/2), got {level}")
    n = x_sorted.shape[0]
    lo = max(1, math.ceil(n * level))
    hi = math.floor(n * (1.0 - level))
    return math.fsum(x_sorted[lo - 1:hi])


def run_trimmed_mean_test(cfg: ExperimentConfig, setup: Optional[LabSetup] = None,
                          event_bus: Optional[EventBus] = None) -> ExperimentReport:
    """sigma_{n,1}^-1 times the trimmed sum against N(0,1), and its distance to the untrimmed sum."""
    started = time.perf_counter()
    setup = setup or build_setup(cfg)
    sizes = sizes_with(cfg, cfg.n_target)
    for n in sizes:
        level = trim_level(cfg, n)
        if level >= 0.5:
            raise DomainError(f"trimming level l_n={level:g} at n={n} removes the whole sample (needs l_n < 1/2)")

    def measure(rp, state: EmpiricalState, n: int):
        trimmed = trimmed_sum(state.x_sorted, trim_level(cfg, n)) / state.sigma
        untrimmed = rp.y1(n) / state.sigma
        return {"trimmed": trimmed, "difference": abs(trimmed - untrimmed)}

    out = sweep(setup, sizes, measure, ["trimmed", "difference"], "trim", event_bus)
    report = setup.new_report("trim")
    n = cfg.n_target
    col = sizes.index(n)
    trimmed = out["trimmed"][:, col]
    for rep, v in enumerate(trimmed):
        report.add(n, rep, "trimmed", v)
    ks = ks_distance(trimmed, normal_cdf)
    report.add(n, AGGREGATE, "ks_vs_normal", ks)
    report.add(n, AGGREGATE, "trim_level", trim_level(cfg, n))
    bound_check(report, "ks_trimmed_mean", "trimmed-mean CLT", ks, cfg.ks_window or 0.10)

    record_replications(report, sizes, out["difference"], "difference")
    diff = out["difference"]
    if len(sizes) >= 2 and np.all(np.median(diff, axis=0) > 0):
        fit = loglog_slope(sizes, diff, setup.bootstrap_samples, setup.bootstrap_rng(2))
        report.add(ACROSS_SIZES, AGGREGATE, "slope_difference", fit.slope)
        bound_check(report, "trimming_negligible", "deleted part shrinks with n", fit.slope, 0.0,
                    note="median |trimmed - untrimmed| must decrease in n")
    return finish(report, started, event_bus)
