# blueprints/covcheck_bp.py
from src.foundry.blueprints import Blueprint

params = {
    "type": "object",
    "properties": {
        "beta": {"type": "number", "description": "Memory parameter in (1/2, 1)."},
        "truncation_eps": {"type": "number", "description": "Truncation accuracy; 1e-6 for the acceptance run."},
        "n_grid": {"type": "string", "description": "Sizes for the sigma^2 slope, e.g. 2^10..2^16."},
        "slowly_varying": {"type": "string", "description": "constant or log_power."},
    },
    "required": [],
}

blueprint = Blueprint(
    id="covcheck",
    description="Compares rho_k k^(2beta-1) with B(2beta-1, 1-beta), fits the sigma^2 slope and checks FFT vs direct autocovariances.",
    parameters=params,
    action_function_name="check_covariances",
    acceptance="ratio at k=1000 within 10%; monotone approach; sigma^2 slope 3-2beta +/- 0.05; FFT residual <= 1e-10",
)
