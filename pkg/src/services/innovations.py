# src/services/innovations.py
"""Samplers for the i.i.d. innovation laws driving a linear process."""
import math

import numpy as np

from src.schemas.lrd import InnovationSpec
from src.services.marginals.models import SmoothedParetoMarginal

_LAPLACE_UNIT_SCALE = 1.0 / math.sqrt(2.0)


def pareto_model(spec: InnovationSpec) -> SmoothedParetoMarginal:
    return SmoothedParetoMarginal(spec.alpha, spec.smoothing_width)


def innovation_variance(spec: InnovationSpec) -> float:
    """sigma_eps^2 of the innovations as drawn."""
    if spec.unit_variance or spec.law == "standard_normal":
        return 1.0
    if spec.law == "double_exponential":
        return 2.0
    return pareto_model(spec).variance


def draw_innovations(spec: InnovationSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draws `size` centered innovations of the given law from `rng`."""
    if spec.law == "standard_normal":
        return rng.standard_normal(size)
    if spec.law == "double_exponential":
        scale = _LAPLACE_UNIT_SCALE if spec.unit_variance else 1.0
        return rng.laplace(0.0, scale, size)
    model = pareto_model(spec)
    # symmetric: sign times the upper-half quantile keeps Q away from 0 and 1
    signs = np.where(rng.random(size) < 0.5, -1.0, 1.0)
    v = rng.random(size)
    draws = signs * model.quantile(0.5 + 0.5 * v)
    if spec.unit_variance:
        draws /= math.sqrt(model.variance)
    return draws
