# src/services/experiments/bahadur_kiefer.py
"""
Uniform and general Bahadur-Kiefer processes.

Under long memory both are dominated by Y_{n,1}^2: the uniform one by
f'(Q(y)) Y_{n,1}^2 / (n sigma_{n,1}), the general one by half of that.
"""
import logging
import time
from typing import List, Optional

import numpy as np

from src.core.errors import DegenerateTargetError, DomainError
from src.event_bus import EventBus
from src.schemas.experiment import ExperimentConfig, ExperimentReport
from src.services.experiments.base import (
    AGGREGATE,
    LabSetup,
    bound_check,
    build_setup,
    finish,
    record_replications,
    sizes_with,
    slope_check,
    sweep,
    window_check,
)
from src.services.processes import EmpiricalState, masked_sup, range_bounds
from src.services.rates import bk_exponent, delta_n, weight_psi
from src.services.statistics import ks_distance, normal_cdf, scaled_chi2_cdf, sign_agreement

logger = logging.getLogger(__name__)

Y0_PANEL = (0.1, 0.2, 0.3, 0.7, 0.8)
DEGENERACY_TOL = 1e-12


def _require_short_memory_branch(beta: float) -> None:
    if beta >= 0.75:
        raise DomainError(f"the Bahadur-Kiefer weak limits need beta < 3/4, got {beta}")


def _limit_coefficient(setup: LabSetup, y0: float) -> float:
    a = float(setup.marginal.fprime_at_Q(y0))
    if abs(a) < DEGENERACY_TOL:
        raise DegenerateTargetError(
            f"f'(Q(y0)) = {a:.3g} at y0={y0} for marginal '{setup.marginal.name}': "
            "the limit a*Z^2 is degenerate; pick another y0"
        )
    return a


def _columns(sizes: List[int], wanted: List[int]) -> List[int]:
    return [sizes.index(n) for n in wanted]


def run_bk_uniform_experiment(cfg: ExperimentConfig, setup: Optional[LabSetup] = None,
                              event_bus: Optional[EventBus] = None) -> ExperimentReport:
    """
    T_n(y0) = sigma_{n,1}^-1 n R~_n(y0) against f'(Q(y0)) Z^2, and the slope of
    sup_y psi_2(y) |R~_n(y) - n^-1 sigma_{n,1}^-1 f'(Q(y)) Y_{n,1}^2| over n_grid.
    """
    started = time.perf_counter()
    _require_short_memory_branch(cfg.beta)
    setup = setup or build_setup(cfg)
    y0 = cfg.y0
    a = _limit_coefficient(setup, y0)
    marginal = setup.marginal
    ctx = setup.weight_context()
    y0_arr = np.array([y0])

    def measure(rp, state: EmpiricalState, n: int):
        y = setup.points(state)
        y1 = rp.y1(n)
        bk = state.alpha_n(y) - state.u_n(y)
        lead = marginal.fprime_at_Q(y) * y1 ** 2 / (n * state.sigma)
        bk0 = float(state.alpha_n(y0_arr)[0] - state.u_n(y0_arr)[0])
        return {
            "T_n": state.scale * bk0,
            "sup_dev": float(np.max(weight_psi(2, y, ctx) * np.abs(bk - lead))),
        }

    sizes = sizes_with(cfg, cfg.n_target)
    out = sweep(setup, sizes, measure, ["T_n", "sup_dev"], "bk-uniform", event_bus)
    report = setup.new_report("bk-uniform")
    report.parameters["derived"]["limit_coefficient"] = a
    n = cfg.n_target
    t_values = out["T_n"][:, sizes.index(n)]
    for rep, v in enumerate(t_values):
        report.add(n, rep, "T_n", v)
    ks = ks_distance(t_values, scaled_chi2_cdf(a))
    report.add(n, AGGREGATE, "ks_T_n_vs_aZ2", ks)
    report.add(n, AGGREGATE, "sign_agreement", sign_agreement(t_values, a))
    bound_check(report, "ks_uniform_bk", "uniform Bahadur-Kiefer weak limit at y0", ks, cfg.ks_window or 0.15,
                note=f"a = f'(Q({y0})) = {a:.5g}; slow convergence under long memory")

    cols = _columns(sizes, cfg.n_grid)
    dev = out["sup_dev"][:, cols]
    record_replications(report, cfg.n_grid, dev, "sup_dev")
    slope_check(report, setup, cfg.n_grid, dev, "sup_dev", bk_exponent(cfg.beta), cfg.slope_window or 0.1,
                "uniform Bahadur-Kiefer approximation, psi_2 weighted")
    return finish(report, started, event_bus)


def run_bk_general_experiment(cfg: ExperimentConfig, setup: Optional[LabSetup] = None,
                              event_bus: Optional[EventBus] = None) -> ExperimentReport:
    """
    sup over (C0 delta_n, 1 - C0 delta_n) of psi_3(y) |R_n(y) - n^-1 sigma_{n,1}^-1 (f'(Q(y))/2) Y_{n,1}^2|
    (the whole of (0,1) when gamma = 1) and the ratio R_n(y0) / R~_n(y0).
    """
    started = time.perf_counter()
    setup = setup or build_setup(cfg)
    setup.require_csr()
    marginal = setup.marginal
    ctx = setup.weight_context()
    full_range = marginal.gamma == 1.0
    y0_arr = np.array([cfg.y0])

    def measure(rp, state: EmpiricalState, n: int):
        y = setup.points(state)
        y1 = rp.y1(n)
        Q = marginal.quantile(y)
        fq = marginal.density_quantile(y)
        general = state.alpha_n(y) - fq * state.q_n(y, Q)
        lead = 0.5 * marginal.fprime_at_Q(y) * y1 ** 2 / (n * state.sigma)
        if full_range:
            lo, hi = range_bounds("full", n)
        else:
            lo, hi = range_bounds("delta_trim", n, setup.c0, delta_n(n, cfg.beta, setup.l0(n)))
        sup = masked_sup(y, general - lead, weight_psi(3, y, ctx), lo, hi)
        r_gen = float(state.alpha_n(y0_arr)[0] - marginal.density_quantile(cfg.y0) * state.q_n(y0_arr)[0])
        r_uni = float(state.alpha_n(y0_arr)[0] - state.u_n(y0_arr)[0])
        return {"sup_dev": sup, "ratio": r_gen / r_uni if r_uni != 0 else np.nan}

    sizes = sizes_with(cfg, cfg.n_target)
    out = sweep(setup, sizes, measure, ["sup_dev", "ratio"], "bk-general", event_bus)
    report = setup.new_report("bk-general")
    report.parameters["derived"]["sup_range"] = "full" if full_range else "delta_trim"
    cols = _columns(sizes, cfg.n_grid)
    dev = out["sup_dev"][:, cols]
    record_replications(report, cfg.n_grid, dev, "sup_dev")
    slope_check(report, setup, cfg.n_grid, dev, "sup_dev", bk_exponent(cfg.beta), cfg.slope_window or 0.1,
                "general Bahadur-Kiefer approximation, psi_3 weighted")

    n = cfg.n_target
    ratios = out["ratio"][:, sizes.index(n)]
    for rep, v in enumerate(ratios):
        report.add(n, rep, "ratio_general_to_uniform", v)
    median_ratio = float(np.nanmedian(ratios))
    report.add(n, AGGREGATE, "median_ratio_general_to_uniform", median_ratio)
    window_check(report, "factor_one_half", "general vs uniform Bahadur-Kiefer at y0", median_ratio, 0.5, 0.1)
    return finish(report, started, event_bus)


def run_weak_convergence_experiment(cfg: ExperimentConfig, setup: Optional[LabSetup] = None,
                                    event_bus: Optional[EventBus] = None) -> ExperimentReport:
    """
    Pointwise weak limits at n = cfg.n_target for y0 (or the y0 panel):
    sigma^-1 n R~_n(y0) => a Z^2, sigma^-1 n R_n(y0) => (a/2) Z^2 and q_n(y0) => N(0,1).
    """
    started = time.perf_counter()
    _require_short_memory_branch(cfg.beta)
    setup = setup or build_setup(cfg)
    marginal = setup.marginal
    report = setup.new_report("weak")
    panel: List[float] = []
    coefficients = {}
    for y0 in (Y0_PANEL if cfg.y0_panel else (cfg.y0,)):
        try:
            coefficients[y0] = _limit_coefficient(setup, y0)
            panel.append(y0)
        except DegenerateTargetError:
            if not cfg.y0_panel:
                raise
            report.notes.append(f"y0={y0} skipped: degenerate limit")
    y0_arr = np.array(panel)
    fq0 = marginal.density_quantile(y0_arr)

    def measure(rp, state: EmpiricalState, n: int):
        alpha = state.alpha_n(y0_arr)
        q = state.q_n(y0_arr)
        uniform = state.scale * (alpha - state.u_n(y0_arr))
        general = state.scale * (alpha - fq0 * q)
        values = {}
        for j, y0 in enumerate(panel):
            values[f"T_uniform@{y0:g}"] = float(uniform[j])
            values[f"T_general@{y0:g}"] = float(general[j])
            values[f"q_n@{y0:g}"] = float(q[j])
        return values

    names = [f"{kind}@{y0:g}" for y0 in panel for kind in ("T_uniform", "T_general", "q_n")]
    n = cfg.n_target
    out = sweep(setup, [n], measure, names, "weak", event_bus)
    ks_window = cfg.ks_window or 0.15
    for y0 in panel:
        a = coefficients[y0]
        tag = f"@{y0:g}"
        uniform = out[f"T_uniform{tag}"][:, 0]
        general = out[f"T_general{tag}"][:, 0]
        q = out[f"q_n{tag}"][:, 0]
        for name, values in (("T_uniform", uniform), ("T_general", general), ("q_n", q)):
            for rep, v in enumerate(values):
                report.add(n, rep, name + tag, v)
        ks_u = ks_distance(uniform, scaled_chi2_cdf(a))
        ks_g = ks_distance(general, scaled_chi2_cdf(0.5 * a))
        ks_q = ks_distance(q, normal_cdf)
        report.add(n, AGGREGATE, "ks_uniform" + tag, ks_u)
        report.add(n, AGGREGATE, "ks_general" + tag, ks_g)
        report.add(n, AGGREGATE, "ks_q_n_vs_normal" + tag, ks_q)
        ratio = np.divide(general, uniform, out=np.full_like(general, np.nan), where=uniform != 0)
        median_ratio = float(np.nanmedian(ratio))
        report.add(n, AGGREGATE, "median_ratio" + tag, median_ratio)
        bound_check(report, "ks_uniform" + tag, "uniform Bahadur-Kiefer weak limit", ks_u, ks_window,
                    note=f"a = {a:.5g}")
        window_check(report, "factor_one_half" + tag, "general vs uniform Bahadur-Kiefer", median_ratio, 0.5, 0.1)
    return finish(report, started, event_bus)
