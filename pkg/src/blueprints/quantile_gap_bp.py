# blueprints/quantile_gap_bp.py
from src.foundry.blueprints import Blueprint

params = {
    "type": "object",
    "properties": {
        "beta": {"type": "number", "description": "Memory parameter in (1/2, 1)."},
        "marginal": {"type": "string", "description": "gaussian (exact) or oracle."},
        "n_grid": {"type": "string", "description": "Sizes for the slope fit."},
        "replications": {"type": "integer", "description": "Monte Carlo replications R (>= 50)."},
        "seed": {"type": "integer", "description": "Master seed."},
        "workers": {"type": "integer", "description": "joblib worker threads; results do not depend on it."},
    },
    "required": [],
}

blueprint = Blueprint(
    id="quantile-gap",
    description="Distance between the general and uniform quantile processes and the general quantile reduction.",
    parameters=params,
    action_function_name="compare_quantile_gap",
    acceptance="both slopes -(beta-1/2) within the window",
)
