# blueprints/rates_bp.py
from src.foundry.blueprints import Blueprint

params = {
    "type": "object",
    "properties": {
        "beta": {"type": "number", "description": "Memory parameter in (1/2, 1)."},
        "p": {"type": "integer", "description": "Reduction order for d_(n,p) and b_(n,p); defaults to 1."},
        "n_grid": {"type": "string", "description": "Sizes to tabulate (n >= 16)."},
    },
    "required": [],
}

blueprint = Blueprint(
    id="rates",
    description="Tabulates a_n, b_n, c_n, d_(n,p), b_(n,p) and delta_n across n_grid with the d_(n,p) branch.",
    parameters=params,
    action_function_name="tabulate_rates",
)
