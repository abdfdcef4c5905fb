# blueprints/reduce_bp.py
from src.foundry.blueprints import Blueprint

params = {
    "type": "object",
    "properties": {
        "beta": {"type": "number", "description": "Memory parameter in (1/2, 1)."},
        "n_grid": {"type": "string", "description": "Sizes for the slope fit, e.g. 2^10..2^16."},
        "marginal": {"type": "string", "description": "gaussian (exact) or oracle."},
        "replications": {"type": "integer", "description": "Monte Carlo replications R (>= 50)."},
        "seed": {"type": "integer", "description": "Master seed."},
        "workers": {"type": "integer", "description": "joblib worker threads; results do not depend on it."},
    },
    "required": [],
}

blueprint = Blueprint(
    id="reduce",
    description="Uniform quantile reduction: slope of sup psi_1 |u_n + sigma^-1 Y_(n,1)| over n_grid.",
    parameters=params,
    action_function_name="reduce_quantiles",
    acceptance="slope -(beta-1/2) +/- 0.08 below beta=3/4, -(1-beta) above",
)
