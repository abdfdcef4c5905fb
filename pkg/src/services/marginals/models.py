# src/services/marginals/models.py
"""
Analytic marginal laws: F, f, Q and the density-quantile function f(Q(y))
with its derivatives. Every method is vectorized over its argument.
"""
import math
from abc import ABC, abstractmethod

import numpy as np
from scipy import optimize, special, stats

from src.core.errors import DomainError
from src.schemas.marginal import MarginalFlags


class MarginalModel(ABC):
    """
    Abstract base class for a continuous marginal law.

    Subclasses supply F, f, Q and `fderiv_at_Q`; the density-quantile
    derivatives are derived from those by the chain rule.
    """
    name: str = "abstract"
    flags: MarginalFlags = MarginalFlags()
    gamma1: float = 1.0
    gamma2: float = 1.0

    @property
    def gamma(self) -> float:
        return min(self.gamma1, self.gamma2)

    @property
    def gamma0(self) -> float:
        return max(self.gamma1, self.gamma2)

    @property
    @abstractmethod
    def variance(self) -> float:
        pass

    @abstractmethod
    def cdf(self, x) -> np.ndarray:
        pass

    @abstractmethod
    def pdf(self, x) -> np.ndarray:
        pass

    @abstractmethod
    def quantile(self, y) -> np.ndarray:
        pass

    @abstractmethod
    def fderiv_at_Q(self, r: int, y) -> np.ndarray:
        """f^{(r)}(Q(y)) for r = 0..3."""
        pass

    def density_quantile(self, y) -> np.ndarray:
        return self.fderiv_at_Q(0, y)

    def fprime_at_Q(self, y) -> np.ndarray:
        return self.fderiv_at_Q(1, y)

    def fsecond_at_Q(self, y) -> np.ndarray:
        return self.fderiv_at_Q(2, y)

    def fthird_at_Q(self, y) -> np.ndarray:
        return self.fderiv_at_Q(3, y)

    def score_deriv(self, y) -> np.ndarray:
        """(f o Q)'(y) = f'(Q(y)) / f(Q(y))."""
        return self.fprime_at_Q(y) / self.density_quantile(y)

    def second_deriv(self, y) -> np.ndarray:
        """(f o Q)''(y) = (f''(Q) f(Q) - f'(Q)^2) / f(Q)^3."""
        f0 = self.density_quantile(y)
        f1 = self.fprime_at_Q(y)
        f2 = self.fsecond_at_Q(y)
        return (f2 * f0 - f1 * f1) / f0 ** 3

    def __repr__(self) -> str:
        return f"{type(self).__name__}(gamma1={self.gamma1:g}, gamma2={self.gamma2:g})"


class GaussianMarginal(MarginalModel):
    name = "gaussian"
    flags = MarginalFlags(C1=True, C2=True, C3=True, CsR1=True, CsR2=True, CsR3=True, CsR4=True)
    gamma1 = 1.0
    gamma2 = 1.0

    def __init__(self, variance: float = 1.0):
        if variance <= 0:
            raise DomainError(f"gaussian marginal needs variance > 0, got {variance}")
        self.sigma = math.sqrt(variance)

    @property
    def variance(self) -> float:
        return self.sigma ** 2

    def cdf(self, x):
        return special.ndtr(np.asarray(x, dtype=float) / self.sigma)

    def pdf(self, x):
        return stats.norm.pdf(np.asarray(x, dtype=float), scale=self.sigma)

    def quantile(self, y):
        return self.sigma * special.ndtri(np.asarray(y, dtype=float))

    def fderiv_at_Q(self, r, y):
        z = special.ndtri(np.asarray(y, dtype=float))
        he = special.eval_hermitenorm(r, z)
        return (-1) ** r * he * stats.norm.pdf(z) / self.sigma ** (r + 1)

    def score_deriv(self, y):
        return -special.ndtri(np.asarray(y, dtype=float)) / self.sigma

    def second_deriv(self, y):
        z = special.ndtri(np.asarray(y, dtype=float))
        return -1.0 / (self.sigma * stats.norm.pdf(z))


class LogisticMarginal(MarginalModel):
    """Logistic law with scale s: f(Q(y)) = y(1-y)/s."""
    name = "logistic"
    flags = MarginalFlags(A1=True, A2=True, A3=True, B=True, C1=True, C2=True, C3=True,
                          CsR1=True, CsR2=True, CsR3=True, CsR4=True)
    gamma1 = 1.0
    gamma2 = 1.0

    def __init__(self, scale: float = 1.0):
        if scale <= 0:
            raise DomainError(f"logistic marginal needs scale > 0, got {scale}")
        self.s = scale

    @property
    def variance(self) -> float:
        return math.pi ** 2 * self.s ** 2 / 3.0

    def cdf(self, x):
        return special.expit(np.asarray(x, dtype=float) / self.s)

    def pdf(self, x):
        F = self.cdf(x)
        return F * (1.0 - F) / self.s

    def quantile(self, y):
        return self.s * special.logit(np.asarray(y, dtype=float))

    def fderiv_at_Q(self, r, y):
        y = np.asarray(y, dtype=float)
        h = y * (1.0 - y)
        h1 = 1.0 - 2.0 * y
        if r == 0:
            return h / self.s
        if r == 1:
            return h * h1 / self.s ** 2
        if r == 2:
            return h * (h1 ** 2 - 2.0 * h) / self.s ** 3
        if r == 3:
            return h * h1 * (h1 ** 2 - 8.0 * h) / self.s ** 4
        raise DomainError(f"derivative order {r} not available")

    def score_deriv(self, y):
        return (1.0 - 2.0 * np.asarray(y, dtype=float)) / self.s

    def second_deriv(self, y):
        return np.full_like(np.asarray(y, dtype=float), -2.0 / self.s)


class ExponentialMarginal(MarginalModel):
    """Exponential law; used as a subordination target, never as an innovation law."""
    name = "exponential"
    flags = MarginalFlags(A1=True, A2=True, A3=True, B=True, C1=True, C2=True, C3=True,
                          CsR1=True, CsR2=True, CsR3=True, CsR4=True)
    gamma1 = 0.0
    gamma2 = 1.0

    def __init__(self, rate: float = 1.0):
        if rate <= 0:
            raise DomainError(f"exponential marginal needs rate > 0, got {rate}")
        self.rate = rate

    @property
    def variance(self) -> float:
        return 1.0 / self.rate ** 2

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, -np.expm1(-self.rate * np.maximum(x, 0.0)), 0.0)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, self.rate * np.exp(-self.rate * np.maximum(x, 0.0)), 0.0)

    def quantile(self, y):
        return -np.log1p(-np.asarray(y, dtype=float)) / self.rate

    def fderiv_at_Q(self, r, y):
        y = np.asarray(y, dtype=float)
        return (-self.rate) ** r * self.rate * (1.0 - y)


class SmoothedParetoMarginal(MarginalModel):
    """
    Symmetric Pareto(alpha) law smoothed around the origin.

    The unnormalized density is (alpha/2)|x|^(-1-alpha) for |x| >= b = 1 + w
    and P(|x|/b) inside, with P(t) = v0 + c4 t^4 + c5 t^5 matching value,
    first and second derivative at t = 1. P is strictly decreasing on (0, 1],
    so the density is positive and unimodal.

    The pure Pareto tail therefore begins at 1 + w, not at 1: on 1 <= |x| < 1 + w
    the bridge lies below the Pareto curve. Only the tail index enters the
    conditions, so gamma1 = gamma2 = (1 + alpha) / alpha regardless of w.
    """
    name = "pareto"
    flags = MarginalFlags(A1=True, A2=True, A3=True, B=False, C1=True, C2=True, C3=True,
                          CsR1=True, CsR2=True, CsR3=True, CsR4=True)

    def __init__(self, alpha: float, smoothing_width: float = 0.5):
        if alpha <= 4.0:
            raise DomainError(f"moment condition violated: pareto marginal needs alpha > 4, got {alpha}")
        if smoothing_width <= 0:
            raise DomainError(f"smoothing_width must be > 0, got {smoothing_width}")
        self.alpha = float(alpha)
        self.width = float(smoothing_width)
        a = self.alpha
        b = 1.0 + self.width
        self.b = b
        A = 0.5 * a * b ** (-1.0 - a)
        self._c5 = A * (1.0 + a) * (5.0 + a) / 5.0
        self._c4 = -A * (1.0 + a) * (6.0 + a) / 4.0
        self._v0 = A - self._c4 - self._c5
        self._Z = 2.0 * b * self._H(1.0) + b ** (-a)
        self._tail_mass = b ** (-a) / (2.0 * self._Z)
        self._tab_tau = np.linspace(0.0, 1.0, 1025)
        self._tab_H = self._H(self._tab_tau)
        self.gamma1 = self.gamma2 = (1.0 + a) / a

    def _H(self, tau):
        return self._v0 * tau + self._c4 * tau ** 5 / 5.0 + self._c5 * tau ** 6 / 6.0

    def _P(self, tau, r: int = 0):
        c4, c5 = self._c4, self._c5
        if r == 0:
            return self._v0 + c4 * tau ** 4 + c5 * tau ** 5
        if r == 1:
            return 4.0 * c4 * tau ** 3 + 5.0 * c5 * tau ** 4
        if r == 2:
            return 12.0 * c4 * tau ** 2 + 20.0 * c5 * tau ** 3
        if r == 3:
            return 24.0 * c4 * tau + 60.0 * c5 * tau ** 2
        raise DomainError(f"derivative order {r} not available")

    @property
    def variance(self) -> float:
        a, b = self.alpha, self.b
        central = b ** 3 * (self._v0 / 3.0 + self._c4 / 7.0 + self._c5 / 8.0)
        tail = 0.5 * a * b ** (2.0 - a) / (a - 2.0)
        return 2.0 * (central + tail) / self._Z

    def _upper_tail(self, ax):
        """P(X > ax) for ax >= 0."""
        inside = 0.5 - self.b * self._H(np.minimum(ax, self.b) / self.b) / self._Z
        outside = np.maximum(ax, self.b) ** (-self.alpha) / (2.0 * self._Z)
        return np.where(ax < self.b, inside, outside)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        upper = self._upper_tail(np.abs(x))
        return np.where(x >= 0, 1.0 - upper, upper)

    def pdf(self, x):
        return self._pdf_deriv(0, np.asarray(x, dtype=float))

    def _pdf_deriv(self, r: int, x):
        ax = np.abs(x)
        sign = np.where(x < 0, -1.0, 1.0) ** r
        tau = np.minimum(ax, self.b) / self.b
        central = self._P(tau, r) / self.b ** r
        rising = np.prod([self.alpha + j for j in range(1, r + 1)]) if r else 1.0
        tail = 0.5 * self.alpha * (-1) ** r * rising * np.maximum(ax, self.b) ** (-1.0 - self.alpha - r)
        return sign * np.where(ax < self.b, central, tail) / self._Z

    def quantile(self, y):
        y = np.asarray(y, dtype=float)
        shape = y.shape
        y = np.atleast_1d(y)
        s = np.minimum(y, 1.0 - y)
        ax = np.empty_like(s)
        in_tail = s <= self._tail_mass
        with np.errstate(divide="ignore"):
            ax[in_tail] = (2.0 * self._Z * s[in_tail]) ** (-1.0 / self.alpha)
        central = ~in_tail
        if np.any(central):
            h = self._Z * (0.5 - s[central]) / self.b
            t0 = np.interp(h, self._tab_H, self._tab_tau)
            t0 = np.clip(t0, 1e-12, 1.0)
            tau = optimize.newton(lambda t: self._H(t) - h, t0, fprime=lambda t: self._P(t), tol=1e-14, maxiter=100)
            ax[central] = np.clip(tau, 0.0, 1.0) * self.b
        return np.where(y < 0.5, -ax, ax).reshape(shape)

    def fderiv_at_Q(self, r, y):
        return self._pdf_deriv(r, self.quantile(y))


def marginal_from_name(name: str, **params) -> MarginalModel:
    """Builds an analytic model by its CLI name: gaussian, logistic, pareto, exponential."""
    if name == "gaussian":
        return GaussianMarginal(params.get("variance", 1.0))
    if name == "logistic":
        return LogisticMarginal(params.get("scale", 1.0))
    if name == "pareto":
        return SmoothedParetoMarginal(params.get("alpha", 5.0), params.get("smoothing_width", 0.5))
    if name == "exponential":
        return ExponentialMarginal(params.get("rate", 1.0))
    raise DomainError(f"unknown marginal model '{name}'; known: gaussian, logistic, pareto, exponential")
