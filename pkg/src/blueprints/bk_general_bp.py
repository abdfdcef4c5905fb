# blueprints/bk_general_bp.py
from src.foundry.blueprints import Blueprint

params = {
    "type": "object",
    "properties": {
        "beta": {"type": "number", "description": "Memory parameter in (1/2, 1)."},
        "y0": {"type": "number", "description": "Evaluation point in (0, 1)."},
        "c0": {"type": "number", "description": "Constant of the (C0 delta_n, 1 - C0 delta_n) range."},
        "n_grid": {"type": "string", "description": "Sizes for the slope fit."},
        "replications": {"type": "integer", "description": "Monte Carlo replications R (>= 50)."},
        "seed": {"type": "integer", "description": "Master seed."},
        "workers": {"type": "integer", "description": "joblib worker threads; results do not depend on it."},
    },
    "required": [],
}

blueprint = Blueprint(
    id="bk-general",
    description="General Bahadur-Kiefer process: psi_3 weighted approximation slope and the factor 1/2 at y0.",
    parameters=params,
    action_function_name="bahadur_kiefer_general",
    acceptance="slope within the window; median R_n/R~_n = 0.5 +/- 0.1",
)
