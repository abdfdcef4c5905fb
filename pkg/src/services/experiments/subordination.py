# src/services/experiments/subordination.py
"""
Subordinated Gaussian sequences Y_i = Q_F(Phi(X_i)) against linear processes.

The same quantile process behaves differently: for an exponential-type
target the subordinated sup |q_n| grows as the trimming shrinks, while the
linear model stays bounded.
"""
import logging
import math
import time
from typing import List, Optional

import numpy as np
from scipy import special

from src.core.errors import ConfigError, DomainError, EmptyRangeError
from src.event_bus import EventBus
from src.schemas.experiment import ExperimentConfig, ExperimentReport, Table
from src.services.experiments.base import (
    AGGREGATE,
    LabSetup,
    bound_check,
    build_setup,
    finish,
    sweep,
)
from src.services.marginals.models import ExponentialMarginal, GaussianMarginal, MarginalModel, marginal_from_name
from src.services.processes import EmpiricalState, masked_sup
from src.services.statistics import sign_test

logger = logging.getLogger(__name__)

SIGN_TEST_LEVEL = 0.05


def subordinate(x: np.ndarray, target: MarginalModel, sd: float = 1.0) -> np.ndarray:
    """Q_F(Phi(x/sd)); the exponential target uses the upper tail of Phi to stay finite."""
    z = np.asarray(x, dtype=float) / sd
    if isinstance(target, ExponentialMarginal):
        y = -np.log(special.ndtr(-z)) / target.rate
    elif isinstance(target, GaussianMarginal):
        y = math.sqrt(target.variance) * z
    else:
        y = target.quantile(special.ndtr(z))
    if not np.all(np.isfinite(y)):
        raise DomainError(f"target '{target.name}' cannot be inverted at every Phi(X_i)")
    return y


def gaussian_density_ratio(target: MarginalModel, y: np.ndarray) -> np.ndarray:
    """phi(Phi^-1(y)) / f(Q(y))."""
    z = special.ndtri(y)
    return np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi) / target.density_quantile(y)


def _levels(cfg: ExperimentConfig, n: int, report: ExperimentReport) -> List[float]:
    levels = [k for k in cfg.trim_levels if k >= 1.0 / n]
    dropped = [k for k in cfg.trim_levels if k < 1.0 / n]
    if dropped:
        report.notes.append(f"trim levels {dropped} are below 1/n and were dropped")
    if not levels:
        raise EmptyRangeError(f"no trim level is >= 1/n = {1.0 / n:.3g}")
    return levels


def _profile(state: EmpiricalState, y: np.ndarray, levels: List[float]) -> List[float]:
    q = np.abs(state.q_n(y))
    return [masked_sup(y, q, None, k, 1.0 - k) for k in levels]


def run_subordinated_comparison(cfg: ExperimentConfig, setup: Optional[LabSetup] = None,
                                event_bus: Optional[EventBus] = None) -> ExperimentReport:
    """
    Growth profiles sup_{(k', 1-k')} |q_n| over cfg.trim_levels for
      - the subordinated model with the target marginal,
      - the identity subordination (the Gaussian base path itself),
      - an independent linear Gaussian path.
    """
    started = time.perf_counter()
    if cfg.innovation != "standard_normal" or not cfg.normalize_unit_variance:
        raise ConfigError("subordination needs a Gaussian base path with sum c_k^2 = 1 "
                          "(innovation=standard_normal, normalize_unit_variance=true)")
    setup = setup or build_setup(cfg)
    target = marginal_from_name(cfg.target, alpha=cfg.pareto_alpha, smoothing_width=cfg.smoothing_width)
    setup.require_csr(target)
    gaussian = setup.marginal
    sd = math.sqrt(gaussian.variance)
    n = cfg.n_target
    report = setup.new_report("subord")
    levels = _levels(cfg, n, report)
    identity_only = isinstance(target, GaussianMarginal)

    def measure(rp, state: EmpiricalState, n: int):
        base_y = setup.points(state)
        sub_state = EmpiricalState(subordinate(rp.path.x, target, sd), target, state.sigma)
        linear = setup.path(rp.path.rep, n, purpose="path")
        lin_state = setup.state(linear.x)
        values = {}
        for arm, st in (("subordinated", sub_state), ("identity", state), ("linear", lin_state)):
            for k, v in zip(levels, _profile(st, setup.points(st) if st is not state else base_y, levels)):
                values[f"{arm}@{k:g}"] = v
        return values

    arms = ("subordinated", "identity", "linear")
    names = [f"{arm}@{k:g}" for arm in arms for k in levels]
    out = sweep(setup, [n], measure, names, "subord", event_bus, purpose="subordinated")
    for name in names:
        for rep, v in enumerate(out[name][:, 0]):
            report.add(n, rep, f"sup_abs_q_n_{name}", v)

    ratio_grid = setup.grid.points
    ratio = gaussian_density_ratio(target, ratio_grid)
    rows = []
    for k in levels:
        tag = f"@{k:g}"
        medians = [float(np.median(out[arm + tag][:, 0])) for arm in arms]
        inside = (ratio_grid > k) & (ratio_grid < 1.0 - k)
        ratio_max = float(np.max(ratio[inside])) if np.any(inside) else float("nan")
        for arm, m in zip(arms, medians):
            report.add(n, AGGREGATE, f"median_sup_abs_q_n_{arm}{tag}", m)
        report.add(n, AGGREGATE, f"max_density_ratio{tag}", ratio_max)
        rows.append([k] + medians + [ratio_max])
    report.tables["profile"] = Table(
        columns=["trim_level", "median_subordinated", "median_identity", "median_linear", "max_density_ratio"],
        rows=rows,
    )

    final = f"@{levels[-1]:g}"
    p_value = sign_test(out["identity" + final][:, 0] - out["linear" + final][:, 0])
    report.add(n, AGGREGATE, "identity_sign_test_p", p_value)
    bound_check(report, "identity_equivalence", "identity subordination vs linear model", p_value,
                SIGN_TEST_LEVEL, upper=False, note="sign test on paired final-level sups")
    if identity_only:
        report.notes.append("target is Gaussian: the subordinated arm is the identity subordination")
    else:
        sub_median = float(np.median(out["subordinated" + final][:, 0]))
        lin_median = float(np.median(out["linear" + final][:, 0]))
        bound_check(report, "subordination_contrast", "subordinated profile exceeds linear at final level",
                    sub_median, lin_median, upper=False, note=f"target '{target.name}'")
    return finish(report, started, event_bus)
