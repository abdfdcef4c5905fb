# blueprints/subord_bp.py
from src.foundry.blueprints import Blueprint

params = {
    "type": "object",
    "properties": {
        "beta": {"type": "number", "description": "Memory parameter in (1/2, 1)."},
        "target": {"type": "string", "description": "exponential, gaussian, logistic or pareto."},
        "trim_levels": {"type": "string", "description": "Comma list of trim levels k in (0, 1/2)."},
        "n": {"type": "integer", "description": "Sample size."},
        "replications": {"type": "integer", "description": "Monte Carlo replications R (>= 50)."},
        "seed": {"type": "integer", "description": "Master seed."},
        "workers": {"type": "integer", "description": "joblib worker threads; results do not depend on it."},
    },
    "required": [],
}

blueprint = Blueprint(
    id="subord",
    description="Growth of sup |q_n| over shrinking trims: subordinated Gaussian vs linear model.",
    parameters=params,
    action_function_name="subordination_contrast",
    acceptance="subordinated > linear at the final level; identity sign test p > 0.05",
)
