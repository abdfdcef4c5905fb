# blueprints/cbp_bp.py
from src.foundry.blueprints import Blueprint

params = {
    "type": "object",
    "properties": {
        "beta": {"type": "number", "description": "Memory parameter in (1/2, 1)."},
        "p": {"type": "integer", "description": "Order label; the constant does not depend on it."},
    },
    "required": [],
}

blueprint = Blueprint(
    id="cbp",
    description="Evaluates the LIL constant c(beta, p) by quadrature and its Beta-function identity residual.",
    parameters=params,
    action_function_name="evaluate_lil_constant",
    acceptance="|I(beta) - B(1-beta, 2beta-1)| / B <= 1e-8",
)
