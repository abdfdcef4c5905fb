# src/schemas/lrd.py
"""Pydantic schemas describing a linear process: coefficients and innovations."""
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class SlowlyVarying(BaseModel):
    """
    The slowly varying factor L_0(k) = scale * l(k).

    `constant` uses l(k) = 1, `log_power` uses l(k) = (log(k + e))**a.
    """
    model_config = ConfigDict(frozen=True)
    kind: Literal["constant", "log_power"] = "constant"
    scale: float = Field(default=1.0, gt=0)
    a: float = 0.0


class CoefficientSpec(BaseModel):
    """Regularly varying coefficients c_k = k**(-beta) * L_0(k) of a linear process."""
    model_config = ConfigDict(frozen=True)
    beta: float = Field(..., gt=0.5, lt=1.0)
    slowly_varying: SlowlyVarying = SlowlyVarying()
    normalize_unit_variance: bool = False
    truncation_eps: float = Field(default=1e-4, gt=0, le=1)
    truncation_index: Optional[int] = Field(default=None, ge=0)
    strict_truncation: bool = False

    @property
    def long_memory_exponent(self) -> float:
        """D = 2*beta - 1, the decay exponent of the autocovariances."""
        return 2.0 * self.beta - 1.0


class InnovationSpec(BaseModel):
    """Law of the i.i.d. centered innovations."""
    model_config = ConfigDict(frozen=True)
    law: Literal["standard_normal", "double_exponential", "smoothed_symmetric_pareto"] = "standard_normal"
    alpha: float = 5.0
    smoothing_width: float = Field(default=0.5, gt=0)
    unit_variance: bool = True

    @model_validator(mode="after")
    def _check_moments(self) -> "InnovationSpec":
        if self.law == "smoothed_symmetric_pareto" and self.alpha <= 4.0:
            raise ValueError(f"smoothed_symmetric_pareto needs alpha > 4 for finite fourth moments, got {self.alpha}")
        return self
