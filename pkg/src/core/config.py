# src/core/config.py
"""
Manages lab-wide configuration using Pydantic's BaseSettings.

Values come from `LRDLAB_*` environment variables or a local `.env` file.
Per-run experiment parameters live in `src.schemas.experiment`; this module
only holds the knobs that are shared by every command (output location,
worker count, grid sizes, memory limits).
"""
import sys
from pathlib import Path

from pydantic import Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Lab settings loaded from the environment.

    Attributes:
        output_dir (Path): Default directory for CSV and summary files.
        workers (int): Number of joblib worker threads for replications.
        log_level (str): Root logging level.
        truncation_cap (int): Largest truncation index K an experiment will use.
        memory_budget (int): Largest number of innovations (n + K) a single path may hold.
        grid_size (int): Number of uniform y-grid points m (points are j/(m+1)).
        tail_depth (int): Dyadic refinement depth near 0 and 1.
        jump_point_limit (int): Largest n for which all empirical jump points join the grid.
        mu (float): Default exponent slack in the weight functions.
        c0 (float): Default constant in the (C0*delta_n, 1 - C0*delta_n) trimming.
        bootstrap_samples (int): Resamples used for slope and median standard errors.
        oracle_truncation (int): Exact head length of each oracle draw; the remote tail is added as a Gaussian.
    """
    output_dir: Path = Path("lrdlab_output")
    workers: int = Field(default=1, ge=1)
    log_level: str = "INFO"
    truncation_cap: int = Field(default=2 ** 20, ge=1)
    memory_budget: int = Field(default=2 ** 25, ge=16)
    grid_size: int = Field(default=4095, ge=15)
    tail_depth: int = Field(default=16, ge=1, le=40)
    jump_point_limit: int = Field(default=2 ** 16, ge=0)
    mu: float = Field(default=0.05, gt=0)
    c0: float = Field(default=1.0, gt=0)
    bootstrap_samples: int = Field(default=200, ge=10)
    oracle_truncation: int = Field(default=4096, ge=1)

    model_config = SettingsConfigDict(env_prefix="LRDLAB_", env_file=".env", extra="ignore")


try:
    settings = Settings()
except ValidationError as e:
    # A broken environment should stop the lab before any simulation starts.
    print("=" * 80, file=sys.stderr)
    print("!!! LRDLAB: FATAL ERROR - INVALID ENVIRONMENT CONFIGURATION !!!", file=sys.stderr)
    print("=" * 80, file=sys.stderr)
    print("One or more LRDLAB_* variables (environment or .env) failed validation.", file=sys.stderr)
    print("\nDETAILS:", file=sys.stderr)
    print(e, file=sys.stderr)
    print("\nACTION REQUIRED:", file=sys.stderr)
    print("Fix or unset the offending variables, for example:", file=sys.stderr)
    print("- LRDLAB_OUTPUT_DIR", file=sys.stderr)
    print("- LRDLAB_WORKERS", file=sys.stderr)
    print("- LRDLAB_MEMORY_BUDGET", file=sys.stderr)
    print("=" * 80, file=sys.stderr)
    sys.exit(1)
