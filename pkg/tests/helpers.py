from src.schemas.experiment import ExperimentConfig


def small_config(**overrides) -> ExperimentConfig:
    """A cheap configuration for smoke runs: short paths, a short filter and a coarse grid."""
    values = dict(
        beta=0.65,
        n_grid=[256, 512],
        replications=50,
        truncation_index=256,
        grid_size=15,
        tail_depth=6,
        mu=0.05,
        c0=1.0,
        workers=1,
    )
    values.update(overrides)
    return ExperimentConfig(**values)
