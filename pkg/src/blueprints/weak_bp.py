# blueprints/weak_bp.py
from src.foundry.blueprints import Blueprint

params = {
    "type": "object",
    "properties": {
        "beta": {"type": "number", "description": "Memory parameter in (1/2, 1)."},
        "y0": {"type": "number", "description": "Evaluation point in (0, 1)."},
        "y0_panel": {"type": "boolean", "description": "Use the panel 0.1, 0.2, 0.3, 0.7, 0.8."},
        "n": {"type": "integer", "description": "Sample size."},
        "replications": {"type": "integer", "description": "Monte Carlo replications R (>= 50)."},
        "seed": {"type": "integer", "description": "Master seed."},
        "workers": {"type": "integer", "description": "joblib worker threads; results do not depend on it."},
    },
    "required": [],
}

blueprint = Blueprint(
    id="weak",
    description="Pointwise weak limits of the Bahadur-Kiefer processes and of q_n at y0 or a y0 panel.",
    parameters=params,
    action_function_name="weak_limits",
    acceptance="KS uniform <= 0.15; median ratio 0.5 +/- 0.1 at every y0",
)
