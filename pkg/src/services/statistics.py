# src/services/statistics.py
"""Summary statistics shared by the experiments: KS distances, weak-limit laws, slopes."""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np
from scipy import special, stats

from src.core.errors import DegenerateTargetError, DomainError

logger = logging.getLogger(__name__)


def ks_distance(sample, cdf: Callable) -> float:
    """One-sample Kolmogorov-Smirnov statistic sup_t |F_R(t) - cdf(t)|."""
    sample = np.asarray(sample, dtype=float)
    if sample.size == 0:
        raise DomainError("KS distance of an empty sample")
    return float(stats.kstest(sample, cdf).statistic)


def normal_cdf(t):
    return special.ndtr(t)


def scaled_chi2_cdf(a: float) -> Callable:
    """
    CDF of a * Z**2 with Z standard normal.

    For a > 0 it is 2 Phi(sqrt(t/a)) - 1 on t >= 0; for a < 0 the law is
    mirrored to t <= 0.
    """
    if a == 0.0 or abs(a) < 1e-12:
        raise DegenerateTargetError(
            f"limit law a*Z^2 with a = {a:.3g} is a point mass at 0; choose y0 with f'(Q(y0)) != 0"
        )

    def cdf(t):
        t = np.asarray(t, dtype=float)
        if a > 0:
            return np.where(t > 0, 2.0 * special.ndtr(np.sqrt(np.maximum(t, 0.0) / a)) - 1.0, 0.0)
        return np.where(t < 0, 2.0 - 2.0 * special.ndtr(np.sqrt(np.maximum(t / a, 0.0))), 1.0)

    return cdf


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    stderr: float
    bootstrap_se: float

    @property
    def se(self) -> float:
        """The larger of the regression and bootstrap standard errors."""
        return max(self.stderr, self.bootstrap_se)


def loglog_slope(ns: Sequence[int], values: np.ndarray, bootstrap: int = 200,
                 rng: np.random.Generator = None) -> SlopeFit:
    """
    Slope of log(median over replications) against log n.

    `values` has shape (R, len(ns)). Replications are resampled as whole
    rows so the dependence between sizes sharing a path is preserved.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[1] != len(ns):
        raise DomainError(f"values must have shape (R, {len(ns)}), got {values.shape}")
    if len(ns) < 2:
        raise DomainError("a slope needs at least two sample sizes")
    x = np.log(np.asarray(ns, dtype=float))
    medians = np.median(values, axis=0)
    if np.any(medians <= 0):
        raise DomainError("log-log slope needs positive medians")
    fit = stats.linregress(x, np.log(medians))
    stderr = float(fit.stderr) if len(ns) > 2 else 0.0
    boot_se = 0.0
    if bootstrap > 0:
        if rng is None:
            rng = np.random.default_rng(0)
        R = values.shape[0]
        slopes = np.empty(bootstrap)
        for b in range(bootstrap):
            m = np.median(values[rng.integers(0, R, R)], axis=0)
            slopes[b] = np.polyfit(x, np.log(np.maximum(m, 1e-300)), 1)[0]
        boot_se = float(np.std(slopes, ddof=1))
    return SlopeFit(slope=float(fit.slope), intercept=float(fit.intercept), stderr=stderr, bootstrap_se=boot_se)


def bootstrap_median_ci(values, bootstrap: int = 200, level: float = 0.95,
                        rng: np.random.Generator = None) -> Tuple[float, float]:
    """Percentile bootstrap interval for the median."""
    values = np.asarray(values, dtype=float)
    if rng is None:
        rng = np.random.default_rng(0)
    meds = np.median(values[rng.integers(0, values.size, (bootstrap, values.size))], axis=1)
    tail = 50.0 * (1.0 - level)
    lo, hi = np.percentile(meds, [tail, 100.0 - tail])
    return float(lo), float(hi)


def sign_test(differences) -> float:
    """Two-sided sign test p-value for a zero median of paired differences; ties are dropped."""
    d = np.asarray(differences, dtype=float)
    d = d[d != 0]
    if d.size == 0:
        return 1.0
    return float(stats.binomtest(int(np.sum(d > 0)), int(d.size), 0.5).pvalue)


def sign_agreement(values, a: float) -> float:
    """Fraction of values with the sign of a (zeros count as disagreement)."""
    values = np.asarray(values, dtype=float)
    return float(np.mean(np.sign(values) == math.copysign(1.0, a)))
