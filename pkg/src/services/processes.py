# src/services/processes.py
"""
Empirical, quantile and Bahadur-Kiefer processes on a y-grid.

All processes are normalized by the exact sigma_{n,1}:
    alpha_n(y) = (n/sigma)(E_n(y) - y)       uniform empirical
    u_n(y)     = (n/sigma)(y - U_n(y))       uniform quantile
    q_n(y)     = (n/sigma)(Q(y) - Q_n(y))    general quantile
    beta_n(Q(y)) = (n/sigma)(F_n(Q(y)) - y)  general empirical at Q
    R_n  = alpha_n - f(Q) q_n                general Bahadur-Kiefer
    R~_n = alpha_n - u_n                     uniform Bahadur-Kiefer
and V~_{n,p} is the raw expansion -f(Q) Y_{n,1} + f'(Q) Y_{n,2}.
"""
import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Iterable, Optional, Tuple

import numpy as np

from src.core.errors import DomainError, EmptyRangeError, UnsupportedOrderError
from src.services.innovations import innovation_variance
from src.services.linear_process import LrdPath, partial_sum_y, sigma_np
from src.services.marginals.models import MarginalModel

logger = logging.getLogger(__name__)

PROCESS_IDS = ("alpha_n", "u_n", "q_n", "beta_n_at_Q", "bk_general", "bk_uniform", "v_tilde_np")


@dataclass(frozen=True)
class YGrid:
    """Strictly increasing evaluation points in (0, 1)."""
    points: np.ndarray
    kind: str
    m: int
    j_max: int = 0

    def __len__(self) -> int:
        return int(self.points.shape[0])


def _finalize(points: np.ndarray) -> np.ndarray:
    points = np.unique(points)
    return points[(points > 0.0) & (points < 1.0)]


def uniform_grid(m: int) -> YGrid:
    return YGrid(points=np.arange(1, m + 1) / (m + 1.0), kind="uniform", m=m)


def tail_refined_grid(m: int, j_max: int) -> YGrid:
    """Uniform j/(m+1) plus 2^-j and 1 - 2^-j for j <= j_max."""
    dyadic = 2.0 ** -np.arange(1, j_max + 1)
    pts = np.concatenate([np.arange(1, m + 1) / (m + 1.0), dyadic, 1.0 - dyadic])
    return YGrid(points=_finalize(pts), kind="tail_refined", m=m, j_max=j_max)


def make_grid(kind: str, m: int, j_max: int) -> YGrid:
    if kind == "uniform":
        return uniform_grid(m)
    if kind == "tail_refined":
        return tail_refined_grid(m, j_max)
    raise DomainError(f"unknown grid kind '{kind}'")


def with_jump_points(grid: YGrid, n: int, u_sorted: Optional[np.ndarray] = None, limit: int = 2 ** 16) -> YGrid:
    """
    Adds the jump locations of the step processes: k/n (quantiles) and the
    uniform order statistics U_(k) (empirical). Above `limit` only every
    ceil(n/limit)-th jump is kept.
    """
    if limit <= 0:
        return grid
    stride = max(1, math.ceil(n / limit))
    extra = [np.arange(1, n, stride) / n]
    if u_sorted is not None:
        extra.append(np.asarray(u_sorted)[::stride])
    pts = _finalize(np.concatenate([grid.points] + extra))
    return YGrid(points=pts, kind=grid.kind, m=grid.m, j_max=grid.j_max)


def order_index(n: int, y) -> np.ndarray:
    """k = ceil(n y) with exact handling of y = k/n, for y in (0, 1]."""
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0.0) or np.any(y > 1.0):
        raise DomainError("sample quantile needs y in (0, 1]")
    t = n * y
    r = np.rint(t)
    k = np.where(np.abs(t - r) <= 1e-9 * np.maximum(1.0, t), r, np.ceil(t))
    return np.clip(k, 1, n).astype(np.int64)


def empirical_cdf(path: LrdPath) -> Callable:
    """F_n as a right-continuous step function of x."""
    xs = np.sort(path.x)
    n = xs.shape[0]

    def F_n(x):
        return np.searchsorted(xs, np.asarray(x, dtype=float), side="right") / n

    return F_n


def sample_quantile(path: LrdPath, y):
    """Q_n(y) = X_{ceil(ny):n}."""
    xs = np.sort(path.x)
    return xs[order_index(xs.shape[0], y) - 1]


def uniform_transform(path: LrdPath, marginal: MarginalModel) -> np.ndarray:
    """U_i = F(X_i)."""
    return marginal.cdf(path.x)


class EmpiricalState:
    """
    Sorted data of one path, shared by every process evaluated on it.

    Built once per (replication, n) so that all processes use the same
    order statistics.
    """

    def __init__(self, x: np.ndarray, marginal: MarginalModel, sigma: float):
        if sigma <= 0:
            raise DomainError(f"normalizer sigma_(n,1) must be > 0, got {sigma}")
        self.n = int(x.shape[0])
        self.marginal = marginal
        self.sigma = float(sigma)
        self.x_sorted = np.sort(x)
        self.u_sorted = marginal.cdf(self.x_sorted)
        if self.u_sorted[0] <= 0.0 or self.u_sorted[-1] >= 1.0:
            raise DomainError(
                f"marginal '{marginal.name}' maps the path outside (0,1); marginal and path are inconsistent"
            )

    @property
    def scale(self) -> float:
        return self.n / self.sigma

    def E_n(self, y) -> np.ndarray:
        return np.searchsorted(self.u_sorted, y, side="right") / self.n

    def F_n(self, x) -> np.ndarray:
        return np.searchsorted(self.x_sorted, x, side="right") / self.n

    def U_n(self, y) -> np.ndarray:
        return self.u_sorted[order_index(self.n, y) - 1]

    def Q_n(self, y) -> np.ndarray:
        return self.x_sorted[order_index(self.n, y) - 1]

    def alpha_n(self, y) -> np.ndarray:
        return self.scale * (self.E_n(y) - y)

    def u_n(self, y) -> np.ndarray:
        return self.scale * (y - self.U_n(y))

    def q_n(self, y, Q: Optional[np.ndarray] = None) -> np.ndarray:
        if Q is None:
            Q = self.marginal.quantile(y)
        return self.scale * (Q - self.Q_n(y))

    def beta_n_at_Q(self, y) -> np.ndarray:
        return self.scale * (self.F_n(self.marginal.quantile(y)) - y)

    def grid_with_jumps(self, grid: YGrid, limit: int) -> YGrid:
        return with_jump_points(grid, self.n, self.u_sorted, limit)


def v_tilde(marginal: MarginalModel, y, p: int, Y1: float, Y2: float = 0.0) -> np.ndarray:
    """V~_{n,p}(y) = -f(Q(y)) Y_{n,1} (+ f'(Q(y)) Y_{n,2} for p = 2), unnormalized."""
    if p == 1:
        return -marginal.density_quantile(y) * Y1
    if p == 2:
        return -marginal.density_quantile(y) * Y1 + marginal.fprime_at_Q(y) * Y2
    raise UnsupportedOrderError("V~_(n,p)", p, "1, 2")


@dataclass(frozen=True)
class ProcessSample:
    """Values of one process on a grid."""
    grid: YGrid
    values: np.ndarray
    process_id: str
    n: int
    normalizer: float

    def to_csv(self, file: Path, weight: Optional[Callable] = None) -> Path:
        """Writes columns y, value, weight, weighted_value."""
        y = self.grid.points
        w = np.ones_like(y) if weight is None else np.asarray(weight(y), dtype=float)
        file = Path(file)
        file.parent.mkdir(parents=True, exist_ok=True)
        with file.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["y", "value", "weight", "weighted_value"])
            for row in zip(y, self.values, w, w * self.values):
                writer.writerow([format(float(v), ".17g") for v in row])
        logger.info(f"Wrote {self.process_id} sample ({len(y)} points) to {file}")
        return file


def build_process(path: LrdPath, marginal: MarginalModel, grid: YGrid, process_id: str, p: int = 1,
                  sigma: Optional[float] = None) -> ProcessSample:
    """Evaluates one process of `path` on `grid`."""
    if process_id not in PROCESS_IDS:
        raise DomainError(f"unknown process '{process_id}'; known: {', '.join(PROCESS_IDS)}")
    if sigma is None:
        sigma = sigma_np(path.spec, path.n, 1, mode="exact", K=path.K,
                         sigma_eps2=innovation_variance(path.innovation_spec))
    state = EmpiricalState(path.x, marginal, sigma)
    y = grid.points
    if process_id == "alpha_n":
        values = state.alpha_n(y)
    elif process_id == "u_n":
        values = state.u_n(y)
    elif process_id == "q_n":
        values = state.q_n(y)
    elif process_id == "beta_n_at_Q":
        values = state.beta_n_at_Q(y)
    elif process_id == "bk_general":
        values = state.alpha_n(y) - marginal.density_quantile(y) * state.q_n(y)
    elif process_id == "bk_uniform":
        values = state.alpha_n(y) - state.u_n(y)
    else:
        if p not in (1, 2):
            raise UnsupportedOrderError("v_tilde_np", p, "1, 2")
        Y2 = partial_sum_y(path, 2) if p == 2 else 0.0
        values = v_tilde(marginal, y, p, partial_sum_y(path, 1), Y2)
    return ProcessSample(grid=grid, values=np.asarray(values, dtype=float), process_id=process_id,
                         n=path.n, normalizer=float(sigma))


def range_bounds(y_range: str, n: int, c0: float = 1.0, delta_n: Optional[float] = None) -> Tuple[float, float]:
    """Open interval (lo, hi) for a sup range: full, delta_trim or one_over_n."""
    if y_range == "full":
        return 0.0, 1.0
    if y_range == "one_over_n":
        return 1.0 / n, 1.0 - 1.0 / n
    if y_range == "delta_trim":
        if delta_n is None:
            raise DomainError("delta_trim range needs delta_n")
        return c0 * delta_n, 1.0 - c0 * delta_n
    raise DomainError(f"unknown sup range '{y_range}'")


def masked_sup(y: np.ndarray, values: np.ndarray, weights=None, lo: float = 0.0, hi: float = 1.0) -> float:
    """max of weight * |value| over grid points strictly inside (lo, hi)."""
    mask = (y > lo) & (y < hi)
    if not np.any(mask):
        raise EmptyRangeError(f"sup range ({lo:.4g}, {hi:.4g}) contains no grid points")
    w = 1.0 if weights is None else np.asarray(weights)[mask] if np.ndim(weights) else weights
    return float(np.max(w * np.abs(np.asarray(values)[mask])))


def weighted_sup(sample: ProcessSample, weight: Optional[Callable] = None, y_range: str = "full",
                 c0: float = 1.0, delta_n: Optional[float] = None) -> float:
    """sup over the grid points in the range of weight(y) * |value(y)|."""
    lo, hi = range_bounds(y_range, sample.n, c0, delta_n)
    y = sample.grid.points
    weights = None if weight is None else np.broadcast_to(np.asarray(weight(y), dtype=float), y.shape)
    return masked_sup(y, sample.values, weights, lo, hi)


def evaluate_all(state: EmpiricalState, y: np.ndarray, ids: Iterable[str]) -> Dict[str, np.ndarray]:
    """Several processes at once, sharing Q(y) and f(Q(y))."""
    ids = set(ids)
    out: Dict[str, np.ndarray] = {}
    Q = state.marginal.quantile(y)
    fq = state.marginal.density_quantile(y)
    alpha = state.alpha_n(y)
    u = state.u_n(y)
    q = state.q_n(y, Q)
    if "alpha_n" in ids:
        out["alpha_n"] = alpha
    if "u_n" in ids:
        out["u_n"] = u
    if "q_n" in ids:
        out["q_n"] = q
    if "beta_n_at_Q" in ids:
        out["beta_n_at_Q"] = state.scale * (state.F_n(Q) - y)
    if "bk_general" in ids:
        out["bk_general"] = alpha - fq * q
    if "bk_uniform" in ids:
        out["bk_uniform"] = alpha - u
    out["fQ"] = fq
    return out
