# src/schemas/experiment.py
"""Pydantic schemas for experiment configuration and reports."""
import re
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

# report row markers: rep for an aggregate over replications, n for a value across sizes
AGGREGATE = -1
ACROSS_SIZES = 0

DEFAULT_N_GRID = [2 ** j for j in range(10, 17)]
DEFAULT_TRIM_LEVELS = [0.05, 0.01, 0.002, 0.0005, 0.0001]

_DYADIC_RANGE = re.compile(r"^\s*2\^(\d+)\s*\.\.\s*2\^(\d+)\s*$")


def _parse_int_token(token: str) -> int:
    token = token.strip()
    if token.startswith("2^"):
        return 2 ** int(token[2:])
    return int(token)


def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        return [t for t in value.replace(";", ",").split(",") if t.strip()]
    return value


class ExperimentConfig(BaseModel):
    """
    Parameters of one Monte Carlo run.

    Keys left at `None` (mu, c0, grid_size, tail_depth, workers) are filled
    from `Settings` by `parse_config`, so the emitted parameter echo always
    carries the values that were actually used.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    beta: float = Field(default=0.65, gt=0.5, lt=1.0)
    innovation: Literal["standard_normal", "double_exponential", "smoothed_symmetric_pareto"] = "standard_normal"
    pareto_alpha: float = Field(default=5.0, gt=4.0)
    smoothing_width: float = Field(default=0.5, gt=0)
    marginal: Literal["gaussian", "oracle"] = "gaussian"
    oracle_size: int = Field(default=100_000, ge=100_000)
    slowly_varying: Literal["constant", "log_power"] = "constant"
    sv_scale: float = Field(default=1.0, gt=0)
    sv_power: float = 0.0
    normalize_unit_variance: bool = True
    truncation_eps: float = Field(default=1e-4, gt=0, le=1)
    truncation_index: Optional[int] = Field(default=None, ge=0)
    n: Optional[int] = Field(default=None, ge=1)
    n_grid: List[int] = Field(default_factory=lambda: list(DEFAULT_N_GRID))
    replications: int = Field(default=200, ge=50)
    seed: int = Field(default=1, ge=0)
    p: Optional[int] = Field(default=None, ge=1, le=3)
    y0: float = Field(default=0.3, gt=0, lt=1)
    y0_panel: bool = False
    mu: Optional[float] = Field(default=None, gt=0)
    c0: Optional[float] = Field(default=None, gt=0)
    nu: float = Field(default=0.9, gt=0)
    alpha_level: float = Field(default=0.05, gt=0, le=1)
    trim_rule: Literal["power", "fixed"] = "power"
    trim_value: float = Field(default=0.5, ge=0)
    trim_levels: List[float] = Field(default_factory=lambda: list(DEFAULT_TRIM_LEVELS))
    target: Literal["exponential", "gaussian", "logistic", "pareto"] = "exponential"
    grid: Literal["uniform", "tail_refined"] = "tail_refined"
    grid_size: Optional[int] = Field(default=None, ge=15)
    tail_depth: Optional[int] = Field(default=None, ge=1, le=40)
    slope_window: Optional[float] = Field(default=None, gt=0)
    ks_window: Optional[float] = Field(default=None, gt=0)
    workers: Optional[int] = Field(default=None, ge=1)

    @field_validator("n_grid", mode="before")
    @classmethod
    def _parse_n_grid(cls, value: Any) -> Any:
        if isinstance(value, str):
            match = _DYADIC_RANGE.match(value)
            if match:
                lo, hi = int(match.group(1)), int(match.group(2))
                return [2 ** j for j in range(lo, hi + 1)]
            return [_parse_int_token(t) for t in _split_list(value)]
        return value

    @field_validator("n_grid")
    @classmethod
    def _check_n_grid(cls, value: List[int]) -> List[int]:
        if not value:
            raise ValueError("n_grid must not be empty")
        if any(n < 2 for n in value):
            raise ValueError("every n in n_grid must be >= 2")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("n_grid must be strictly increasing")
        return value

    @field_validator("trim_levels", mode="before")
    @classmethod
    def _parse_trim_levels(cls, value: Any) -> Any:
        return _split_list(value)

    @field_validator("trim_levels")
    @classmethod
    def _check_trim_levels(cls, value: List[float]) -> List[float]:
        if any(not 0 < v < 0.5 for v in value):
            raise ValueError("trim levels must lie in (0, 1/2)")
        return sorted(value, reverse=True)

    @property
    def n_target(self) -> int:
        """Sample size for single-n experiments."""
        return self.n if self.n is not None else self.n_grid[-1]

    @property
    def n_max(self) -> int:
        return max(self.n_target, self.n_grid[-1])


class ReportRow(BaseModel):
    """One CSV row. `rep == -1` marks an aggregate over replications."""
    experiment: str
    n: int
    rep: int
    statistic: str
    value: float


class AcceptanceCheck(BaseModel):
    """A pass/fail window on one reported statistic."""
    name: str
    description: str
    observed: float
    expected: float
    tolerance: float
    passed: bool
    note: str = ""


class Table(BaseModel):
    """An extra CSV table attached to a report (e.g. a simulated path or a band)."""
    columns: List[str]
    rows: List[List[float]]


class ExperimentReport(BaseModel):
    """Monte Carlo summary of one experiment."""
    experiment: str
    parameters: Dict[str, Any]
    rows: List[ReportRow] = Field(default_factory=list)
    checks: List[AcceptanceCheck] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)
    tables: Dict[str, Table] = Field(default_factory=dict)
    runtime_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def add(self, n: int, rep: int, statistic: str, value: float) -> None:
        self.rows.append(ReportRow(experiment=self.experiment, n=n, rep=rep, statistic=statistic, value=float(value)))

    def values(self, statistic: str, n: Optional[int] = None, rep: Optional[int] = None) -> List[float]:
        """Convenience lookup used by tests and the summary formatter."""
        return [
            r.value for r in self.rows
            if r.statistic == statistic and (n is None or r.n == n) and (rep is None or r.rep == rep)
        ]


class RunConfig(BaseModel):
    """A fully validated command invocation."""
    command: str
    experiment: ExperimentConfig
    output_dir: Path
    emit_csv: bool = True
    emit_summary: bool = True
    explicit_keys: List[str] = Field(default_factory=list)
