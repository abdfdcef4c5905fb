# blueprints/lil_bp.py
from src.foundry.blueprints import Blueprint

params = {
    "type": "object",
    "properties": {
        "beta": {"type": "number", "description": "Memory parameter in (1/2, 1)."},
        "n_grid": {"type": "string", "description": "Checkpoints along the path."},
        "replications": {"type": "integer", "description": "Monte Carlo replications R (>= 50)."},
        "seed": {"type": "integer", "description": "Master seed."},
        "workers": {"type": "integer", "description": "joblib worker threads; results do not depend on it."},
    },
    "required": [],
}

blueprint = Blueprint(
    id="lil",
    description="LIL tracks of Y_(n,1), the uniform Bahadur-Kiefer sup and the empirical sup along one path.",
    parameters=params,
    action_function_name="track_lil",
    acceptance="running max of the partial-sum track in [0.2c, 3c]",
)
