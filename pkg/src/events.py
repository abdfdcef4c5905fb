# events.py
from dataclasses import dataclass, field
from typing import Any, Dict


# --- Experiment Progress Events ---

@dataclass
class ReplicationBatchFinished:
    """Published by the experiment engine after all replications for one n are done."""
    experiment: str
    n: int
    replications: int
    elapsed_seconds: float


@dataclass
class ExperimentFinished:
    """Published when an experiment has produced its report."""
    experiment: str
    passed: bool
    checks: Dict[str, bool] = field(default_factory=dict)


# --- Output Events ---

@dataclass
class ReportWritten:
    """Published by the ReportService after a CSV or summary file lands on disk."""
    path: str
    kind: str  # "csv" or "summary"
    rows: int = 0
    extra: Dict[str, Any] = field(default_factory=dict)
