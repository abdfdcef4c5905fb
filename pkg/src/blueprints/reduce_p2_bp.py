# blueprints/reduce_p2_bp.py
from src.foundry.blueprints import Blueprint

params = {
    "type": "object",
    "properties": {
        "beta": {"type": "number", "description": "Memory parameter in (1/2, 1)."},
        "p": {"type": "integer", "description": "Reduction order, 1 or 2."},
        "n_grid": {"type": "string", "description": "Sizes for the slope fit."},
        "replications": {"type": "integer", "description": "Monte Carlo replications R (>= 50)."},
        "seed": {"type": "integer", "description": "Master seed."},
        "workers": {"type": "integer", "description": "joblib worker threads; results do not depend on it."},
    },
    "required": [],
}

blueprint = Blueprint(
    id="reduce-p2",
    description="Second-order quantile reduction with V~_(n,2), normalized by sigma_(n,p).",
    parameters=params,
    action_function_name="reduce_quantiles_p2",
    acceptance="slope -(2beta - p(beta-1/2)) within the window; needs beta < 3/4",
)
