# src/services/experiments/base.py
"""
Shared machinery of the Monte Carlo experiments.

`LabSetup` turns an ExperimentConfig into the objects every experiment
needs (coefficients, truncation, exact second order, marginal, grid).
`sweep` runs replications in parallel: each replication simulates one path
at the largest size and evaluates its prefixes, so the sizes of a
replication share their innovations.
"""
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from src.core.config import Settings, settings as default_settings
from src.core.errors import ConditionNotMetError, ConfigError
from src.core.parallel import run_parallel
from src.core.streams import stream
from src.event_bus import EventBus
from src.events import ExperimentFinished, ReplicationBatchFinished
from src.schemas.experiment import ACROSS_SIZES, AGGREGATE, AcceptanceCheck, ExperimentConfig, ExperimentReport
from src.schemas.lrd import CoefficientSpec, InnovationSpec, SlowlyVarying
from src.services.innovations import innovation_variance
from src.services.linear_process import (
    LrdPath,
    SecondOrder,
    achieved_truncation_eps,
    marginal_variance,
    partial_sum_track,
    resolve_truncation,
    sample_path,
    slowly_varying_factor,
)
from src.services.marginals.models import GaussianMarginal, MarginalModel
from src.services.processes import EmpiricalState, YGrid, make_grid, with_jump_points
from src.services.rates import WeightContext
from src.services.statistics import SlopeFit, bootstrap_median_ci, loglog_slope

logger = logging.getLogger(__name__)


def parameter_echo(cfg: ExperimentConfig, command: str, derived: Dict) -> Dict:
    """The config plus everything derived from it, as written on the first line of every output file."""
    echo = {"command": command}
    echo.update(cfg.model_dump(mode="json"))
    echo["derived"] = dict(derived)
    return echo


def coefficient_spec_from(cfg: ExperimentConfig) -> CoefficientSpec:
    return CoefficientSpec(
        beta=cfg.beta,
        slowly_varying=SlowlyVarying(kind=cfg.slowly_varying, scale=cfg.sv_scale, a=cfg.sv_power),
        normalize_unit_variance=cfg.normalize_unit_variance,
        truncation_eps=cfg.truncation_eps,
        truncation_index=cfg.truncation_index,
    )


def innovation_spec_from(cfg: ExperimentConfig) -> InnovationSpec:
    return InnovationSpec(law=cfg.innovation, alpha=cfg.pareto_alpha, smoothing_width=cfg.smoothing_width)


@dataclass
class LabSetup:
    cfg: ExperimentConfig
    coefficient_spec: CoefficientSpec
    innovation_spec: InnovationSpec
    K: int
    achieved_eps: float
    second_order: SecondOrder
    marginal: MarginalModel
    grid: YGrid
    mu: float
    c0: float
    workers: int
    jump_point_limit: int
    bootstrap_samples: int
    memory_budget: int
    _sigma_cache: Dict[int, float] = field(default_factory=dict)

    @property
    def beta(self) -> float:
        return self.cfg.beta

    def sigma(self, n: int) -> float:
        """Exact sigma_{n,1} of the truncated model."""
        if n not in self._sigma_cache:
            self._sigma_cache[n] = self.second_order.sigma_n1(n)
        return self._sigma_cache[n]

    def l0(self, n: int) -> float:
        return float(slowly_varying_factor(self.coefficient_spec, float(n)))

    def path(self, rep: int, n: Optional[int] = None, purpose: str = "path") -> LrdPath:
        return sample_path(self.coefficient_spec, self.innovation_spec, n or self.cfg.n_max, self.cfg.seed,
                           rep=rep, K=self.K, memory_budget=self.memory_budget, purpose=purpose)

    def state(self, x: np.ndarray, marginal: Optional[MarginalModel] = None) -> EmpiricalState:
        return EmpiricalState(x, marginal or self.marginal, self.sigma(int(x.shape[0])))

    def points(self, state: EmpiricalState) -> np.ndarray:
        """Base grid plus the jump points of the state's step processes."""
        return with_jump_points(self.grid, state.n, state.u_sorted, self.jump_point_limit).points

    def weight_context(self, a_p_holds: bool = False, marginal: Optional[MarginalModel] = None) -> WeightContext:
        m = marginal or self.marginal
        return WeightContext(beta=self.beta, gamma=m.gamma, mu=self.mu, c2=m.flags.C2, c3=m.flags.C3,
                             a_p_holds=a_p_holds)

    def require_csr(self, marginal: Optional[MarginalModel] = None) -> None:
        m = marginal or self.marginal
        failed = m.flags.first_failed_csr()
        if failed is not None:
            raise ConditionNotMetError(failed, m.name)

    def parameters(self, command: str) -> Dict:
        return parameter_echo(self.cfg, command, {
            "truncation_K": self.K,
            "achieved_truncation_eps": self.achieved_eps,
            "grid_points": len(self.grid),
            "jump_point_limit": self.jump_point_limit,
            "bootstrap_samples": self.bootstrap_samples,
            "marginal_model": self.marginal.name,
            "mu": self.mu,
            "c0": self.c0,
            "workers": self.workers,
        })

    def new_report(self, experiment: str, command: Optional[str] = None) -> ExperimentReport:
        return ExperimentReport(experiment=experiment, parameters=self.parameters(command or experiment))

    def bootstrap_rng(self, salt: int = 0) -> np.random.Generator:
        return stream(self.cfg.seed, salt, "bootstrap")


def build_setup(cfg: ExperimentConfig, app_settings: Optional[Settings] = None,
                marginal: Optional[MarginalModel] = None) -> LabSetup:
    """
    Resolves truncation, exact second order and the marginal for `cfg`.

    The exact Gaussian marginal needs Gaussian innovations; other laws go
    through the simulation oracle.
    """
    s = app_settings or default_settings
    spec = coefficient_spec_from(cfg)
    inn = innovation_spec_from(cfg)
    K = resolve_truncation(spec, cap=s.truncation_cap)
    eps = achieved_truncation_eps(spec, K)
    sigma_eps2 = innovation_variance(inn)
    second = SecondOrder(spec, K, sigma_eps2)
    workers = cfg.workers or s.workers
    if marginal is None:
        if cfg.marginal == "gaussian":
            if inn.law != "standard_normal":
                raise ConfigError(
                    f"marginal=gaussian is exact only for standard_normal innovations (got {inn.law}); "
                    "use marginal=oracle"
                )
            marginal = GaussianMarginal(marginal_variance(spec, inn, K))
        else:
            from src.services.marginals.oracle import oracle_marginal_from_simulation
            marginal = oracle_marginal_from_simulation(spec, inn, cfg.oracle_size, cfg.seed, K,
                                                       head=s.oracle_truncation, workers=workers)
    grid = make_grid(cfg.grid, cfg.grid_size or s.grid_size, cfg.tail_depth or s.tail_depth)
    logger.info(
        f"Lab setup: beta={cfg.beta}, K={K} (eps {eps:.3g}), marginal={marginal.name}, "
        f"grid={grid.kind}[{len(grid)}], workers={workers}"
    )
    return LabSetup(
        cfg=cfg, coefficient_spec=spec, innovation_spec=inn, K=K, achieved_eps=eps, second_order=second,
        marginal=marginal, grid=grid, mu=cfg.mu if cfg.mu is not None else s.mu,
        c0=cfg.c0 if cfg.c0 is not None else s.c0, workers=workers, jump_point_limit=s.jump_point_limit,
        bootstrap_samples=s.bootstrap_samples, memory_budget=s.memory_budget,
    )


class Replicate:
    """One replication's path with lazily computed partial-sum tracks."""

    def __init__(self, path: LrdPath):
        self.path = path
        self._y2_track: Optional[np.ndarray] = None

    def prefix(self, n: int) -> LrdPath:
        return self.path if n == self.path.n else self.path.prefix(n)

    def y1(self, n: int) -> float:
        return math.fsum(self.path.x[:n])

    def y2(self, n: int) -> float:
        if self._y2_track is None:
            self._y2_track = partial_sum_track(self.path, 2)
        return float(self._y2_track[n - 1])


Measure = Callable[[Replicate, EmpiricalState, int], Dict[str, float]]


def sweep(setup: LabSetup, sizes: Sequence[int], measure: Measure, names: Sequence[str],
          experiment: str, event_bus: Optional[EventBus] = None, replications: Optional[int] = None,
          purpose: str = "path") -> Dict[str, np.ndarray]:
    """
    Runs `measure` for every replication and size.

    Returns one (R, len(sizes)) array per statistic name, rows in
    replication order whatever the worker count.
    """
    sizes = list(sizes)
    R = replications or setup.cfg.replications
    n_top = max(sizes)

    def one(rep: int) -> np.ndarray:
        rp = Replicate(setup.path(rep, n_top, purpose=purpose))
        out = np.empty((len(sizes), len(names)))
        for j, n in enumerate(sizes):
            prefix = rp.prefix(n)
            values = measure(rp, setup.state(prefix.x), n)
            out[j] = [values[name] for name in names]
        logger.debug(f"{experiment}: replication {rep} done")
        return out

    start = time.perf_counter()
    results = np.stack(run_parallel(one, range(R), setup.workers))
    elapsed = time.perf_counter() - start
    if event_bus is not None:
        for n in sizes:
            event_bus.emit("replication_batch_finished", ReplicationBatchFinished(
                experiment=experiment, n=n, replications=R, elapsed_seconds=elapsed))
    logger.info(f"{experiment}: {R} replications x {len(sizes)} sizes in {elapsed:.1f}s")
    return {name: results[:, :, k] for k, name in enumerate(names)}


def record_replications(report: ExperimentReport, sizes: Sequence[int], values: np.ndarray, statistic: str) -> None:
    """Per-replication rows plus the median and its bootstrap interval per size."""
    for j, n in enumerate(sizes):
        for rep, v in enumerate(values[:, j]):
            report.add(n, rep, statistic, v)
        report.add(n, AGGREGATE, f"median_{statistic}", float(np.median(values[:, j])))


def record_median_ci(report: ExperimentReport, setup: LabSetup, sizes: Sequence[int], values: np.ndarray,
                     statistic: str) -> None:
    rng = setup.bootstrap_rng(1)
    for j, n in enumerate(sizes):
        lo, hi = bootstrap_median_ci(values[:, j], setup.bootstrap_samples, rng=rng)
        report.add(n, AGGREGATE, f"median_{statistic}_ci_lo", lo)
        report.add(n, AGGREGATE, f"median_{statistic}_ci_hi", hi)


def slope_check(report: ExperimentReport, setup: LabSetup, sizes: Sequence[int], values: np.ndarray,
                statistic: str, expected: float, window: float, description: str) -> SlopeFit:
    """
    Fits the log-log slope of the medians and records a pass/fail window.

    The check passes when |slope - expected| <= max(window, 2 SE).
    """
    fit = loglog_slope(sizes, values, setup.bootstrap_samples, setup.bootstrap_rng(0))
    report.add(ACROSS_SIZES, AGGREGATE, f"slope_{statistic}", fit.slope)
    report.add(ACROSS_SIZES, AGGREGATE, f"slope_se_{statistic}", fit.se)
    report.add(ACROSS_SIZES, AGGREGATE, f"expected_slope_{statistic}", expected)
    tolerance = max(window, 2.0 * fit.se)
    report.checks.append(AcceptanceCheck(
        name=f"slope_{statistic}", description=description, observed=fit.slope, expected=expected,
        tolerance=tolerance,
        passed=abs(fit.slope - expected) <= tolerance,
        note="log log factors are not removed before fitting",
    ))
    return fit


def bound_check(report: ExperimentReport, name: str, description: str, observed: float, bound: float,
                upper: bool = True, note: str = "") -> AcceptanceCheck:
    """observed <= bound (upper) or observed >= bound."""
    passed = observed <= bound if upper else observed >= bound
    check = AcceptanceCheck(name=name, description=description, observed=observed, expected=bound, tolerance=0.0,
                            passed=bool(passed), note=note)
    report.checks.append(check)
    return check


def window_check(report: ExperimentReport, name: str, description: str, observed: float, expected: float,
                 tolerance: float, note: str = "") -> AcceptanceCheck:
    check = AcceptanceCheck(name=name, description=description, observed=observed, expected=expected,
                            tolerance=tolerance,
                            passed=abs(observed - expected) <= tolerance, note=note)
    report.checks.append(check)
    return check


def finish(report: ExperimentReport, started: float, event_bus: Optional[EventBus] = None) -> ExperimentReport:
    report.runtime_seconds = time.perf_counter() - started
    if event_bus is not None:
        event_bus.emit("experiment_finished", ExperimentFinished(
            experiment=report.experiment, passed=report.passed,
            checks={c.name: c.passed for c in report.checks}))
    status = "passed" if report.passed else "FAILED"
    logger.info(f"Experiment '{report.experiment}' {status} in {report.runtime_seconds:.1f}s "
                f"({len(report.rows)} rows, {len(report.checks)} checks)")
    return report


def sizes_with(cfg: ExperimentConfig, extra: Optional[int] = None) -> List[int]:
    sizes = set(cfg.n_grid)
    if extra is not None:
        sizes.add(extra)
    return sorted(sizes)
