# blueprints/trim_bp.py
from src.foundry.blueprints import Blueprint

params = {
    "type": "object",
    "properties": {
        "beta": {"type": "number", "description": "Memory parameter in (1/2, 1)."},
        "trim_rule": {"type": "string", "description": "power (l_n = n^-trim_value) or fixed."},
        "trim_value": {"type": "number", "description": "Exponent or fixed level."},
        "n": {"type": "integer", "description": "Sample size for the KS comparison."},
        "replications": {"type": "integer", "description": "Monte Carlo replications R (>= 50)."},
        "seed": {"type": "integer", "description": "Master seed."},
        "workers": {"type": "integer", "description": "joblib worker threads; results do not depend on it."},
    },
    "required": [],
}

blueprint = Blueprint(
    id="trim",
    description="CLT for trimmed sums of order statistics.",
    parameters=params,
    action_function_name="trimmed_mean",
    acceptance="KS vs N(0,1) <= 0.10; deleted part shrinks with n",
)
