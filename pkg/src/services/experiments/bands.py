# src/services/experiments/bands.py
"""Simultaneous confidence bands for the quantile function and their coverage."""
import logging
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special

from src.core.errors import ConfigError, DomainError
from src.event_bus import EventBus
from src.schemas.experiment import ExperimentConfig, ExperimentReport, Table
from src.schemas.marginal import MarginalFlags
from src.services.experiments.base import (
    AGGREGATE,
    LabSetup,
    bound_check,
    build_setup,
    finish,
    sweep,
)
from src.services.processes import EmpiricalState, order_index

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuantileBand:
    y: np.ndarray
    center: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    c_nu: float
    z: float

    def covers(self, quantile) -> bool:
        q = quantile(self.y)
        return bool(np.all((self.lower <= q) & (q <= self.upper)))


def band_constants(nu: float, alpha_level: float):
    """c_nu = sup (y(1-y))^nu = 4^-nu and the two-sided normal quantile z."""
    if not 0 < alpha_level <= 1:
        raise DomainError(f"alpha_level must lie in (0, 1], got {alpha_level}")
    return 4.0 ** (-nu), float(special.ndtri(1.0 - alpha_level / 2.0))


def quantile_confidence_band(x: np.ndarray, sigma: float, nu: float, alpha_level: float,
                             grid: np.ndarray) -> QuantileBand:
    """Q_n(y) -/+ sigma n^-1 c_nu z (y(1-y))^-nu on the grid points inside (1/n, 1-1/n)."""
    if sigma <= 0:
        raise DomainError(f"sigma must be > 0, got {sigma}")
    x_sorted = np.sort(np.asarray(x, dtype=float))
    n = x_sorted.shape[0]
    y = np.asarray(grid, dtype=float)
    y = y[(y > 1.0 / n) & (y < 1.0 - 1.0 / n)]
    c_nu, z = band_constants(nu, alpha_level)
    center = x_sorted[order_index(n, y) - 1]
    half = sigma / n * c_nu * z * (y * (1.0 - y)) ** (-nu)
    return QuantileBand(y=y, center=center, lower=center - half, upper=center + half, c_nu=c_nu, z=z)


def validate_band_exponent(beta: float, gamma: float, flags: MarginalFlags, nu: float) -> str:
    """Returns the applicable row of the nu table or raises ConfigError naming it."""
    if beta < 0.75 and (flags.A2 or flags.C2):
        row, bound = "beta < 3/4 with A(2) or C(2): nu > gamma - (beta - 1/2)", gamma - (beta - 0.5)
    elif beta < 0.75:
        row, bound = "beta < 3/4 without A(2), C(2): nu > 2 gamma - beta", 2.0 * gamma - beta
    else:
        row, bound = "beta >= 3/4: nu > 2 gamma - (beta - 1/2)", 2.0 * gamma - (beta - 0.5)
    if not nu > bound:
        raise ConfigError(f"band exponent nu={nu} violates row '{row}' (needs nu > {bound:.4g})")
    return row


def run_band(cfg: ExperimentConfig, setup: Optional[LabSetup] = None,
             event_bus: Optional[EventBus] = None) -> ExperimentReport:
    """One band from replication 0 at n = cfg.n_target, emitted as a table."""
    started = time.perf_counter()
    setup = setup or build_setup(cfg)
    marginal = setup.marginal
    row = validate_band_exponent(cfg.beta, marginal.gamma, marginal.flags, cfg.nu)
    n = cfg.n_target
    path = setup.path(0, n)
    state = setup.state(path.x)
    band = quantile_confidence_band(path.x, setup.sigma(n), cfg.nu, cfg.alpha_level, setup.points(state))
    truth = marginal.quantile(band.y)
    report = setup.new_report("band")
    report.parameters["derived"].update({"band_row": row, "c_nu": band.c_nu, "z_alpha": band.z})
    report.tables["band"] = Table(
        columns=["y", "lower", "center", "upper", "true_quantile"],
        rows=np.column_stack([band.y, band.lower, band.center, band.upper, truth]).tolist(),
    )
    report.add(n, 0, "covered", float(band.covers(marginal.quantile)))
    report.add(n, 0, "width_at_half", float(2.0 * setup.sigma(n) / n * band.c_nu * band.z * 4.0 ** cfg.nu))
    return finish(report, started, event_bus)


def run_coverage_experiment(cfg: ExperimentConfig, setup: Optional[LabSetup] = None,
                            event_bus: Optional[EventBus] = None) -> ExperimentReport:
    """Fraction of replications whose band holds Q(y) at every grid point in (1/n, 1-1/n)."""
    started = time.perf_counter()
    setup = setup or build_setup(cfg)
    marginal = setup.marginal
    row = validate_band_exponent(cfg.beta, marginal.gamma, marginal.flags, cfg.nu)

    def measure(rp, state: EmpiricalState, n: int):
        band = quantile_confidence_band(state.x_sorted, state.sigma, cfg.nu, cfg.alpha_level, setup.points(state))
        return {"covered": float(band.covers(marginal.quantile))}

    n = cfg.n_target
    out = sweep(setup, [n], measure, ["covered"], "coverage", event_bus)
    covered = out["covered"][:, 0]
    report = setup.new_report("coverage")
    report.parameters["derived"]["band_row"] = row
    for rep, v in enumerate(covered):
        report.add(n, rep, "covered", v)
    coverage = float(np.mean(covered))
    report.add(n, AGGREGATE, "coverage", coverage)
    target = 1.0 - cfg.alpha_level - 0.05
    bound_check(report, "simultaneous_coverage", "quantile confidence band", coverage, target, upper=False,
                note=f"nominal {1.0 - cfg.alpha_level:.3g}")
    return finish(report, started, event_bus)
