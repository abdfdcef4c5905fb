# blueprints/bk_uniform_bp.py
from src.foundry.blueprints import Blueprint

params = {
    "type": "object",
    "properties": {
        "beta": {"type": "number", "description": "Memory parameter in (1/2, 1)."},
        "y0": {"type": "number", "description": "Evaluation point in (0, 1) with f'(Q(y0)) != 0."},
        "n": {"type": "integer", "description": "Size of the weak-limit sample."},
        "n_grid": {"type": "string", "description": "Sizes for the slope fit."},
        "replications": {"type": "integer", "description": "Monte Carlo replications R (>= 50)."},
        "seed": {"type": "integer", "description": "Master seed."},
        "workers": {"type": "integer", "description": "joblib worker threads; results do not depend on it."},
    },
    "required": [],
}

blueprint = Blueprint(
    id="bk-uniform",
    description="Uniform Bahadur-Kiefer process: weak limit at y0 and the psi_2 weighted approximation slope.",
    parameters=params,
    action_function_name="bahadur_kiefer_uniform",
    acceptance="KS vs f'(Q(y0)) Z^2 <= 0.15; slope within the window",
)
