# blueprints/simulate_bp.py
from src.foundry.blueprints import Blueprint

params = {
    "type": "object",
    "properties": {
        "n": {"type": "integer", "description": "Path length (defaults to the largest n in n_grid)."},
        "seed": {"type": "integer", "description": "Master seed; replication 0 is exported."},
        "beta": {"type": "number", "description": "Memory parameter in (1/2, 1)."},
        "innovation": {"type": "string", "description": "standard_normal, double_exponential or smoothed_symmetric_pareto."},
        "truncation_eps": {"type": "number", "description": "Relative tail mass of sum c_k^2 left out."},
    },
    "required": [],
}

blueprint = Blueprint(
    id="simulate",
    description="Samples one LRD linear path and writes it as an (i, x_i) table.",
    parameters=params,
    action_function_name="simulate_path",
)
