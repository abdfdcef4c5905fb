# blueprints/coverage_bp.py
from src.foundry.blueprints import Blueprint

params = {
    "type": "object",
    "properties": {
        "beta": {"type": "number", "description": "Memory parameter in (1/2, 1)."},
        "nu": {"type": "number", "description": "Band exponent."},
        "alpha_level": {"type": "number", "description": "Nominal level alpha."},
        "n": {"type": "integer", "description": "Sample size."},
        "replications": {"type": "integer", "description": "Monte Carlo replications R (>= 50)."},
        "seed": {"type": "integer", "description": "Master seed."},
        "workers": {"type": "integer", "description": "joblib worker threads; results do not depend on it."},
    },
    "required": [],
}

blueprint = Blueprint(
    id="coverage",
    description="Empirical simultaneous coverage of the quantile confidence band.",
    parameters=params,
    action_function_name="band_coverage",
    acceptance="coverage >= 1 - alpha - 0.05",
)
