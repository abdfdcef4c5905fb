# src/core/errors.py
"""Exception hierarchy shared by every lab service."""


class LabError(Exception):
    """Base class for all errors raised deliberately by the lab."""


class DomainError(LabError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class UnsupportedOrderError(DomainError):
    """Requested expansion or partial-sum order is not implemented."""

    def __init__(self, what: str, order: int, supported: str):
        super().__init__(f"{what}: order {order} is not supported (supported: {supported}).")
        self.order = order


class BoundaryCaseError(DomainError):
    """(p+1)(2*beta-1) == 1, the excluded boundary case of the rate formulas."""

    def __init__(self, beta: float, p: int):
        super().__init__(
            f"boundary case (p+1)(2*beta-1) = 1 with beta={beta}, p={p} is excluded; "
            "pick a different beta or p."
        )
        self.beta = beta
        self.p = p


class MemoryBudgetError(LabError):
    """A path would need more innovations than the configured memory budget."""

    def __init__(self, required: int, budget: int):
        super().__init__(
            f"path needs n+K = {required} innovations which exceeds the memory budget of {budget} "
            "(raise LRDLAB_MEMORY_BUDGET or lower n / truncation)."
        )
        self.required = required
        self.budget = budget


class TruncationError(LabError):
    """An explicit truncation index cannot meet the requested tail tolerance."""

    def __init__(self, given: int, required: int, eps: float):
        super().__init__(
            f"truncation index K={given} does not meet truncation_eps={eps:g}; K >= {required} is required."
        )
        self.given = given
        self.required = required


class DegenerateTargetError(DomainError):
    """A weak-limit target collapses to a point mass, e.g. f'(Q(y0)) = 0."""


class ConditionNotMetError(LabError):
    """A marginal model fails a regularity condition an experiment relies on."""

    def __init__(self, condition: str, model: str):
        super().__init__(f"marginal '{model}' does not satisfy condition {condition}.")
        self.condition = condition
        self.model = model


class EmptyRangeError(DomainError):
    """A supremum was requested over a range that contains no grid points."""


class QuadratureError(LabError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, what: str, abserr: float, tol: float):
        super().__init__(f"quadrature for {what} did not converge: achieved abserr={abserr:.3e}, required {tol:.1e}.")
        self.abserr = abserr


class ConfigError(LabError):
    """A run configuration is invalid (unknown key, bad value, violated table row)."""
