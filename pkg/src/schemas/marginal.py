# src/schemas/marginal.py
"""Pydantic schemas for marginal-law regularity conditions."""
from typing import List, Optional

from pydantic import BaseModel, ConfigDict


class MarginalFlags(BaseModel):
    """Analytic truth values of the regularity conditions for one marginal law."""
    model_config = ConfigDict(frozen=True)
    A1: bool = False
    A2: bool = False
    A3: bool = False
    B: bool = False
    C1: bool = False
    C2: bool = False
    C3: bool = False
    CsR1: bool = False
    CsR2: bool = False
    CsR3: bool = False
    CsR4: bool = False

    def A(self, p: int) -> bool:
        return getattr(self, f"A{p}")

    def C(self, p: int) -> bool:
        return getattr(self, f"C{p}")

    @property
    def csr_all(self) -> bool:
        return self.CsR1 and self.CsR2 and self.CsR3 and self.CsR4

    def first_failed_csr(self) -> Optional[str]:
        for name in ("CsR1", "CsR2", "CsR3", "CsR4"):
            if not getattr(self, name):
                return name
        return None


class ConditionReport(BaseModel):
    """Result of `condition_report`: stored flags plus numeric spot checks."""
    model: str
    p: int
    A: bool
    B: bool
    C: bool
    CsR1: bool
    CsR2: bool
    CsR3: bool
    CsR4: bool
    gamma1: float
    gamma2: float
    gamma: float
    gamma0: float
    C_numeric: bool
    C_sup_coarse: List[float]
    C_sup_fine: List[float]
    csr3_sup: float
    csr4_monotone: bool
    weight_bound_sup: float
