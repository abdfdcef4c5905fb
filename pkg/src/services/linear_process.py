# src/services/linear_process.py
"""
Long-range dependent linear processes X_i = sum_k c_k eps_{i-k}.

Coefficients are regularly varying with index -beta, the infinite moving
average is truncated at a finite K and paths are produced by FFT
convolution of n + K innovations, so X_1..X_n is exactly stationary for the
truncated model.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy import fft as sp_fft
from scipy import integrate, signal, special

from src.core.config import settings
from src.core.errors import DomainError, MemoryBudgetError, TruncationError, UnsupportedOrderError
from src.core.streams import stream
from src.schemas.lrd import CoefficientSpec, InnovationSpec
from src.services.innovations import draw_innovations, innovation_variance

logger = logging.getLogger(__name__)


def slowly_varying_factor(spec: CoefficientSpec, k) -> np.ndarray:
    """L_0(k) = scale * l(k) evaluated at (real) k >= 1."""
    sv = spec.slowly_varying
    k = np.asarray(k, dtype=float)
    if sv.kind == "constant":
        return np.full_like(k, sv.scale)
    return sv.scale * np.log(k + np.e) ** sv.a


def _raw_coefficients(spec: CoefficientSpec, K: int) -> np.ndarray:
    k = np.arange(K + 1, dtype=float)
    c = np.empty(K + 1)
    c[0] = slowly_varying_factor(spec, 1.0)
    if K >= 1:
        c[1:] = k[1:] ** (-spec.beta) * slowly_varying_factor(spec, k[1:])
    return c


def _total_and_tail(spec: CoefficientSpec):
    """
    Returns (total, tail) where total = sum_{k>=0} c_k^2 (unnormalized) and
    tail(K) is an upper bound on sum_{k>K} c_k^2 by integral comparison.
    """
    sv = spec.slowly_varying
    two_beta = 2.0 * spec.beta
    if sv.kind == "constant":
        s2 = sv.scale ** 2
        total = s2 * (1.0 + special.zeta(two_beta, 1))

        def tail(K: int) -> float:
            if K == 0:
                return s2 * special.zeta(two_beta, 1)
            return s2 * K ** (1.0 - two_beta) / (two_beta - 1.0)

        return total, tail

    def g(x: float) -> float:
        return x ** (-two_beta) * (sv.scale * math.log(x + math.e) ** sv.a) ** 2

    head = 2000
    c_head = _raw_coefficients(spec, head)
    tail_int, _ = integrate.quad(g, head, np.inf, limit=200)
    total = float(np.sum(c_head ** 2) + tail_int)

    def tail(K: int) -> float:
        if K == 0:
            return total - float(c_head[0] ** 2)
        if K < head:
            return float(np.sum(c_head[K + 1:] ** 2) + tail_int)
        # integrand is eventually decreasing; the extra g(K) term keeps the bound safe
        val, _ = integrate.quad(g, K, np.inf, limit=200)
        return val + g(K)

    return total, tail


def tail_truncation_index(spec: CoefficientSpec) -> int:
    """Smallest K whose (bounded) tail variance is at most truncation_eps of the total."""
    total, tail = _total_and_tail(spec)
    target = spec.truncation_eps * total
    if tail(0) <= target:
        return 0
    sv = spec.slowly_varying
    d = 2.0 * spec.beta - 1.0
    if sv.kind == "constant":
        K = max(1, math.ceil((spec.truncation_eps * (1.0 + special.zeta(2.0 * spec.beta, 1)) * d) ** (-1.0 / d)))
        # guard against rounding at the boundary
        while K > 1 and tail(K - 1) <= target:
            K -= 1
        while tail(K) > target:
            K += 1
        return K
    hi = 1
    while tail(hi) > target:
        hi *= 2
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail(mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi


def achieved_truncation_eps(spec: CoefficientSpec, K: int) -> float:
    """Tail-variance fraction bound actually achieved at truncation index K."""
    total, tail = _total_and_tail(spec)
    return float(tail(K) / total)


def make_coefficients(spec: CoefficientSpec, K: int) -> np.ndarray:
    """
    c_0..c_K with c_0 = L_0(1) and c_k = k**(-beta) L_0(k).

    If `spec.strict_truncation` is set, K must meet `spec.truncation_eps`.
    """
    if K < 0:
        raise DomainError(f"truncation index must be >= 0, got {K}")
    if spec.strict_truncation:
        required = tail_truncation_index(spec)
        if K < required:
            raise TruncationError(K, required, spec.truncation_eps)
    c = _raw_coefficients(spec, K)
    if spec.normalize_unit_variance:
        c /= math.sqrt(math.fsum(c * c))
    return c


def resolve_truncation(spec: CoefficientSpec, cap: Optional[int] = None) -> int:
    """The K a path will use: the explicit index, else the eps-derived one, capped."""
    if spec.truncation_index is not None:
        return spec.truncation_index
    K = tail_truncation_index(spec)
    if cap is not None and K > cap:
        logger.warning(
            f"Truncation index {K} for eps={spec.truncation_eps:g} exceeds cap {cap}; "
            f"using K={cap} (achieved eps {achieved_truncation_eps(spec, cap):.3g})."
        )
        return cap
    return K


@dataclass(frozen=True)
class LrdPath:
    """
    One simulated trajectory.

    `innovations[j]` holds eps_{j+1-K}, so x[i-1] = sum_k c_k innovations[i-1+K-k].
    """
    x: np.ndarray
    innovations: np.ndarray
    coefficients: np.ndarray
    spec: CoefficientSpec
    innovation_spec: InnovationSpec
    seed: int
    K: int
    rep: int = 0

    @property
    def n(self) -> int:
        return int(self.x.shape[0])

    def prefix(self, n: int) -> "LrdPath":
        """The path X_1..X_n sharing this path's innovations."""
        if not 1 <= n <= self.n:
            raise DomainError(f"prefix length {n} outside 1..{self.n}")
        return replace(self, x=self.x[:n], innovations=self.innovations[:n + self.K])

    def scaled(self, factor: float) -> "LrdPath":
        """The path c*X (innovations scaled alike)."""
        return replace(self, x=self.x * factor, innovations=self.innovations * factor)


def path_from_innovations(spec: CoefficientSpec, innovation_spec: InnovationSpec, innovations: np.ndarray,
                          K: int, seed: int = 0, rep: int = 0) -> LrdPath:
    """Builds a path from a given innovation record of length n + K."""
    innovations = np.array(innovations, dtype=float)
    n = innovations.shape[0] - K
    if n < 1:
        raise DomainError(f"need at least K+1 = {K + 1} innovations, got {innovations.shape[0]}")
    c = make_coefficients(spec, K)
    x = signal.fftconvolve(innovations, c, mode="valid")
    x.setflags(write=False)
    innovations.setflags(write=False)
    return LrdPath(x=x, innovations=innovations, coefficients=c, spec=spec,
                   innovation_spec=innovation_spec, seed=seed, K=K, rep=rep)


def sample_path(spec: CoefficientSpec, innovation_spec: InnovationSpec, n: int, seed: int, rep: int = 0,
                K: Optional[int] = None, memory_budget: Optional[int] = None, purpose: str = "path") -> LrdPath:
    """Draws n + K innovations from stream(seed, rep, purpose) and convolves them with the coefficients."""
    if n < 1:
        raise DomainError(f"path length must be >= 1, got {n}")
    if K is None:
        K = resolve_truncation(spec)
    if memory_budget is None:
        memory_budget = settings.memory_budget
    if n + K > memory_budget:
        raise MemoryBudgetError(n + K, memory_budget)
    rng = stream(seed, rep, purpose)
    innovations = draw_innovations(innovation_spec, rng, n + K)
    path = path_from_innovations(spec, innovation_spec, innovations, K, seed=seed, rep=rep)
    logger.debug(f"Sampled path n={n} K={K} seed={seed} rep={rep}")
    return path


def _quadratic_terms(path: LrdPath) -> np.ndarray:
    """Per-index second-order terms (X_i^2 - W_i)/2, W_i = sum_j c_j^2 eps_{i-j}^2."""
    w = signal.fftconvolve(path.innovations ** 2, path.coefficients ** 2, mode="valid")
    return 0.5 * (path.x ** 2 - w)


def partial_sum_y(path: LrdPath, r: int) -> float:
    """Y_{n,r}: n for r=0, sum of X_i for r=1, the ordered-pair sum for r=2."""
    if r == 0:
        return float(path.n)
    if r == 1:
        return math.fsum(path.x)
    if r == 2:
        return math.fsum(_quadratic_terms(path))
    raise UnsupportedOrderError("partial_sum_y", r, "0, 1, 2")


def partial_sum_track(path: LrdPath, r: int) -> np.ndarray:
    """Y_{m,r} for every prefix m = 1..n (cumulative, float64 summation)."""
    if r == 0:
        return np.arange(1, path.n + 1, dtype=float)
    if r == 1:
        return np.cumsum(path.x)
    if r == 2:
        return np.cumsum(_quadratic_terms(path))
    raise UnsupportedOrderError("partial_sum_track", r, "0, 1, 2")


def autocovariance(spec: CoefficientSpec, k: int, K: Optional[int] = None, sigma_eps2: float = 1.0) -> float:
    """rho_k = sigma_eps^2 * sum_m c_m c_{m+k} over the truncated coefficients."""
    if k < 0:
        raise DomainError(f"lag must be >= 0, got {k}")
    if K is None:
        K = resolve_truncation(spec)
    if k > K:
        return 0.0
    c = make_coefficients(spec, K)
    return sigma_eps2 * float(np.dot(c[:K + 1 - k], c[k:]))


def autocovariances(spec: CoefficientSpec, K: int, max_lag: Optional[int] = None,
                    sigma_eps2: float = 1.0) -> np.ndarray:
    """rho_0..rho_max_lag via FFT autocorrelation of the coefficient array."""
    c = make_coefficients(spec, K)
    if max_lag is None:
        max_lag = K
    nfft = sp_fft.next_fast_len(2 * (K + 1))
    spectrum = sp_fft.rfft(c, nfft)
    acf = sp_fft.irfft(spectrum * np.conj(spectrum), nfft)[:K + 1]
    rho = np.zeros(max_lag + 1)
    m = min(max_lag, K)
    rho[:m + 1] = sigma_eps2 * acf[:m + 1]
    return rho


def autocovariance_tail(spec: CoefficientSpec, lags, K: int, sigma_eps2: float = 1.0) -> np.ndarray:
    """
    sum_{m > K-k} c_m c_{m+k} for each lag k in 0..K: the part of rho_k that
    truncation at K leaves out, approximated by a midpoint integral.
    """
    k = np.atleast_1d(np.asarray(lags, dtype=float))
    if k.size and (k.min() < 0 or k.max() > K):
        raise DomainError(f"lags must lie in 0..K={K}")
    norm = make_coefficients(spec, K)[1] / float(slowly_varying_factor(spec, 1.0)) if K >= 1 else 1.0
    beta = spec.beta
    d = 2.0 * beta - 1.0
    a = K - k + 0.5
    sv = spec.slowly_varying
    if sv.kind == "constant":
        # int_a^inf x^-beta (x+k)^-beta dx = a^(1-2beta) / (2beta-1) * 2F1(beta, 2beta-1; 2beta; -k/a)
        tail = sv.scale ** 2 * a ** -d / d * special.hyp2f1(beta, d, 2.0 * beta, -k / a)
    else:
        def g(x: float, lag: float) -> float:
            return float(x ** -beta * (x + lag) ** -beta
                         * slowly_varying_factor(spec, x) * slowly_varying_factor(spec, x + lag))

        tail = np.array([integrate.quad(g, lo, np.inf, args=(lag,), limit=200)[0] for lo, lag in zip(a, k)])
    return sigma_eps2 * norm ** 2 * tail


def autocovariance_untruncated(spec: CoefficientSpec, k: int, K: int, sigma_eps2: float = 1.0) -> float:
    """rho_k of the infinite moving average: the truncated sum plus `autocovariance_tail`."""
    if not 0 <= k <= K:
        raise DomainError(f"lag must lie in 0..K={K}, got {k}")
    c = make_coefficients(spec, K)
    return sigma_eps2 * float(np.dot(c[:K + 1 - k], c[k:])) + float(autocovariance_tail(spec, k, K, sigma_eps2)[0])


def sigma2_from_rho(rho: np.ndarray, n: int) -> float:
    """Var(sum_{i<=n} X_i) = n rho_0 + 2 sum_{k=1}^{n-1} (n-k) rho_k, rho_k = 0 beyond the array."""
    m = min(n - 1, rho.shape[0] - 1)
    if m <= 0:
        return float(n * rho[0])
    k = np.arange(1, m + 1, dtype=float)
    return float(n * rho[0] + 2.0 * np.dot(n - k, rho[1:m + 1]))


class SecondOrder:
    """
    Autocovariances and normalizing scales for one coefficient spec.

    Holds rho_0..rho_K once, so sigma_{n,1} for many n costs one dot product each.
    """

    def __init__(self, spec: CoefficientSpec, K: int, sigma_eps2: float = 1.0):
        self.spec = spec
        self.K = K
        self.sigma_eps2 = sigma_eps2
        self._rho = autocovariances(spec, K, sigma_eps2=sigma_eps2)

    def rho(self, k: int) -> float:
        return float(self._rho[k]) if 0 <= k <= self.K else 0.0

    @property
    def rho_array(self) -> np.ndarray:
        return self._rho

    def sigma2_n1(self, n: int) -> float:
        return sigma2_from_rho(self._rho, n)

    def sigma_n1(self, n: int) -> float:
        return math.sqrt(self.sigma2_n1(n))

    def sigma_np_asymptotic(self, n: int, p: int) -> float:
        return sigma_np(self.spec, n, p, mode="asymptotic")


def sigma_np(spec: CoefficientSpec, n: int, p: int, mode: str = "exact", K: Optional[int] = None,
             sigma_eps2: float = 1.0, rho: Optional[np.ndarray] = None) -> float:
    """
    sigma_{n,p}: exact standard deviation of Y_{n,1} (p = 1 only), or the
    asymptotic scale n**(1 - p(beta - 1/2)) L_0(n)**p.
    """
    if p < 1:
        raise DomainError(f"sigma_np needs p >= 1, got {p}")
    if n < 1:
        raise DomainError(f"sigma_np needs n >= 1, got {n}")
    d = 2.0 * spec.beta - 1.0
    if mode == "asymptotic":
        if p * d >= 1.0:
            raise DomainError(
                f"asymptotic sigma_(n,p) requires p < 1/(2*beta-1) = {1.0 / d:.4g}; got p={p}, beta={spec.beta}"
            )
        l0 = float(slowly_varying_factor(spec, float(n)))
        return n ** (1.0 - p * (spec.beta - 0.5)) * l0 ** p
    if mode != "exact":
        raise DomainError(f"unknown sigma_np mode '{mode}'")
    if p != 1:
        raise UnsupportedOrderError("exact sigma_np", p, "1")
    if rho is None:
        if K is None:
            K = resolve_truncation(spec)
        rho = autocovariances(spec, K, max_lag=min(n - 1, K), sigma_eps2=sigma_eps2)
    return math.sqrt(sigma2_from_rho(rho, n))


def marginal_variance(spec: CoefficientSpec, innovation_spec: InnovationSpec, K: int) -> float:
    """Var(X_1) = sigma_eps^2 * sum c_k^2 for the truncated model."""
    c = make_coefficients(spec, K)
    return innovation_variance(innovation_spec) * math.fsum(c * c)
