# src/services/rates.py
"""
Rate constants of the strong approximations, the weight functions psi_1..psi_4
and the LIL constant c(beta, p).

All logarithms are natural; log log n is evaluated at max(n, 16).
"""
import logging
import math
from dataclasses import asdict, dataclass
from typing import Callable, Dict

import numpy as np
from scipy import integrate, special

from src.core.errors import BoundaryCaseError, DomainError, QuadratureError

logger = logging.getLogger(__name__)

QUAD_RTOL = 1e-8


def loglog(n: float) -> float:
    return math.log(math.log(max(n, 16)))


def boundary_margin(beta: float, p: int) -> float:
    """(p+1)(2 beta - 1) - 1; its sign selects the d_{n,p} branch."""
    return (p + 1) * (2.0 * beta - 1.0) - 1.0


def is_boundary(beta: float, p: int) -> bool:
    return math.isclose(boundary_margin(beta, p), 0.0, abs_tol=1e-12)


@dataclass(frozen=True)
class RateConstants:
    n: int
    beta: float
    p: int
    a_n: float
    b_n: float
    c_n: float
    d_np: float
    b_np: float
    delta_n: float
    branch: str  # "long" when (p+1)(2beta-1) > 1, else "short"

    def as_dict(self) -> Dict[str, float]:
        return {k: v for k, v in asdict(self).items() if isinstance(v, float) and k != "beta"}


def rate_constants(n: int, beta: float, p: int = 1, l0: float = 1.0) -> RateConstants:
    """a_n, b_n, c_n, d_{n,p}, b_{n,p} and delta_n with L_0(n) = l0."""
    if n < 16:
        raise DomainError(f"rate constants need n >= 16, got {n}")
    if not 0.5 < beta < 1.0:
        raise DomainError(f"beta must lie in (1/2, 1), got {beta}")
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    if is_boundary(beta, p):
        raise BoundaryCaseError(beta, p)
    ll = loglog(n)
    ln = math.log(n)
    a_n = n ** (-(beta - 0.5)) * l0 * ll
    b_n = n ** (-(3.0 * beta - 2.5)) * l0 ** 3 * ll ** 1.5
    c_n = n ** (-(2.0 * beta - 1.0)) * l0 ** 2 * ll ** 1.5 * ln ** 0.5
    if boundary_margin(beta, p) > 0:
        branch = "long"
        d_np = n ** (-(1.0 - beta)) / l0 * ln ** 2.5 * ll ** 0.75
    else:
        branch = "short"
        d_np = n ** (-p * (beta - 0.5)) * l0 ** p * ln ** 0.5 * ll ** 0.75
    b_np = n ** (2.0 - 2.0 * beta) * l0 ** 2 * d_np * ll ** 0.5
    return RateConstants(n=n, beta=beta, p=p, a_n=a_n, b_n=b_n, c_n=c_n, d_np=d_np, b_np=b_np,
                         delta_n=delta_n(n, beta, l0), branch=branch)


def delta_n(n: int, beta: float, l0: float = 1.0) -> float:
    """n^-(2beta-1) L_0(n)^2 log log n, the trimming scale of the general Bahadur-Kiefer bound."""
    return n ** (-(2.0 * beta - 1.0)) * l0 ** 2 * loglog(n)


@dataclass(frozen=True)
class WeightContext:
    """Everything the psi weights depend on besides y."""
    beta: float
    gamma: float = 1.0
    mu: float = 0.05
    c2: bool = False
    c3: bool = False
    a_p_holds: bool = False

    def __post_init__(self):
        if self.mu <= 0:
            raise DomainError(f"mu must be > 0, got {self.mu}")
        if self.gamma < 1:
            raise DomainError(f"gamma must be >= 1, got {self.gamma}")


def psi_exponent(which: int, ctx: WeightContext) -> float:
    """Exponent e with psi(y) = (y(1-y))**e; 0 means psi == 1."""
    b, g, mu = ctx.beta, ctx.gamma, ctx.mu
    if which == 1:
        if ctx.a_p_holds:
            return 0.0
        if b < 0.75:
            return 0.0 if ctx.c2 else g - 0.5 + mu
        return g + mu
    if which == 2:
        if b >= 0.75:
            return g + mu
        if ctx.c3 or g < 1.5:
            return 1.0 + mu
        return g - 0.5 + mu
    if which == 3:
        if b >= 0.75:
            return 2.0 + 2.0 * g + mu
        return 1.0 + mu if ctx.c3 else 2.0 * g - 1.0 + mu
    if which == 4:
        return 0.0 if b < 0.75 else 1.0
    raise DomainError(f"unknown weight selector psi_{which}; expected 1..4")


def weight_psi(which: int, y, ctx: WeightContext):
    """psi_which(y) for y in (0, 1)."""
    y = np.asarray(y, dtype=float)
    if np.any((y <= 0) | (y >= 1)):
        raise DomainError("weights are defined for y in (0, 1)")
    e = psi_exponent(which, ctx)
    if e == 0.0:
        return np.ones_like(y)
    return (y * (1.0 - y)) ** e


def weight_function(which: int, ctx: WeightContext) -> Callable:
    psi_exponent(which, ctx)
    return lambda y: weight_psi(which, y, ctx)


def power_weight(nu: float) -> Callable:
    """(y(1-y))**nu; its sup over (0,1) is 4**-nu."""
    return lambda y: (np.asarray(y) * (1.0 - np.asarray(y))) ** nu


def beta_integral(beta: float) -> float:
    """
    I(beta) = int_0^inf x^-beta (1+x)^-beta dx.

    With x = t/(1-t) the integrand becomes t^-beta (1-t)^(2beta-2), which
    QUADPACK handles as an algebraic endpoint weight.
    """
    if not 0.5 < beta < 1.0:
        raise DomainError(f"beta must lie in (1/2, 1), got {beta}")
    value, abserr = integrate.quad(lambda t: 1.0, 0.0, 1.0, weight="alg", wvar=(-beta, 2.0 * beta - 2.0),
                                   epsabs=0.0, epsrel=1e-12, limit=200)
    if not math.isfinite(value) or abserr > QUAD_RTOL * abs(value):
        raise QuadratureError(f"I({beta})", abserr, QUAD_RTOL * abs(value))
    return value


def c_beta_p(beta: float, p: int = 1) -> float:
    """c(beta, p) = sqrt(I(beta) / ((1-beta)(3-2beta))); the formula does not depend on p."""
    value = beta_integral(beta)
    c = math.sqrt(value / ((1.0 - beta) * (3.0 - 2.0 * beta)))
    logger.debug(f"c({beta}, {p}) = {c:.10g} (I = {value:.10g})")
    return c


def beta_identity_residual(beta: float) -> float:
    """|I(beta) - B(1-beta, 2beta-1)| / B(1-beta, 2beta-1)."""
    exact = special.beta(1.0 - beta, 2.0 * beta - 1.0)
    return abs(beta_integral(beta) - exact) / exact


# Expected log-log slopes used by the acceptance windows.

def reduction_exponent(beta: float) -> float:
    """Slope of the psi_1-weighted uniform quantile reduction error: a_n or d_{n,1}."""
    return -(beta - 0.5) if beta < 0.75 else -(1.0 - beta)


def reduction_p_exponent(beta: float, p: int) -> float:
    """Slope of the order-p reduction after dividing by sigma_{n,p}: -(2beta - p(beta - 1/2))."""
    return -(2.0 * beta - p * (beta - 0.5))


def bk_exponent(beta: float) -> float:
    """Slope of the Bahadur-Kiefer approximation error: c_n below 2/3, d_{n,2} above."""
    return -(2.0 * beta - 1.0) if beta < 2.0 / 3.0 else -(1.0 - beta)


def empirical_growth_exponent(beta: float, p: int) -> float:
    """Growth of sup |n(E_n - y) - V~_{n,p}|: 1/2 above the boundary, else 1 - (p+1)(2beta-1)/2."""
    if is_boundary(beta, p):
        raise BoundaryCaseError(beta, p)
    if boundary_margin(beta, p) > 0:
        return 0.5
    return 1.0 - (p + 1) * (2.0 * beta - 1.0) / 2.0
