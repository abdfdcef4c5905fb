# blueprints/empirical_bp.py
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
    id="empirical",
    description="Uniform empirical reduction: growth of sup |n(E_n - y) - V~_(n,p)|.",
    parameters=params,
    action_function_name="reduce_empirical",
    acceptance="growth 1/2 or 1 - (p+1)(2beta-1)/2 within the window",
)
