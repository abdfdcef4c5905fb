"""
Marginal-law models and regularity-condition checks.

The simulation oracle lives in `oracle.py`; it depends on the linear-process
service and is imported from there directly.
"""
from .models import (
    ExponentialMarginal,
    GaussianMarginal,
    LogisticMarginal,
    MarginalModel,
    SmoothedParetoMarginal,
    marginal_from_name,
)
from .conditions import condition_report


def gaussian_marginal(variance: float = 1.0) -> GaussianMarginal:
    return GaussianMarginal(variance)


def logistic_marginal(scale: float = 1.0) -> LogisticMarginal:
    return LogisticMarginal(scale)


def smoothed_symmetric_pareto_marginal(alpha: float, smoothing_width: float = 0.5) -> SmoothedParetoMarginal:
    return SmoothedParetoMarginal(alpha, smoothing_width)


__all__ = [
    "MarginalModel",
    "GaussianMarginal",
    "LogisticMarginal",
    "ExponentialMarginal",
    "SmoothedParetoMarginal",
    "marginal_from_name",
    "gaussian_marginal",
    "logistic_marginal",
    "smoothed_symmetric_pareto_marginal",
    "condition_report",
]
