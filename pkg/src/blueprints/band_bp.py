# blueprints/band_bp.py
from src.foundry.blueprints import Blueprint

params = {
    "type": "object",
    "properties": {
        "beta": {"type": "number", "description": "Memory parameter in (1/2, 1)."},
        "nu": {"type": "number", "description": "Band exponent; validated against the applicable row."},
        "alpha_level": {"type": "number", "description": "Nominal level alpha."},
        "n": {"type": "integer", "description": "Sample size."},
        "replications": {"type": "integer", "description": "Monte Carlo replications R (>= 50)."},
        "seed": {"type": "integer", "description": "Master seed."},
        "workers": {"type": "integer", "description": "joblib worker threads; results do not depend on it."},
    },
    "required": [],
}

blueprint = Blueprint(
    id="band",
    description="One simultaneous confidence band for Q(y) from replication 0.",
    parameters=params,
    action_function_name="confidence_band",
)
