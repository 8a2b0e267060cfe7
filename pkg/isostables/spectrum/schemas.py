from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict

from isostables.spectrum.models import LeadingClass, Stability


# ===============================================
# Response Schemas
# ===============================================

class EigenpairModel(BaseModel):
    """One eigenvalue with its right and left eigenvectors"""
    index: int
    eigenvalue: complex
    right_vector: List[complex]
    left_vector: List[complex]


class SpectrumReport(BaseModel):
    """Schema for the spectrum command output"""
    model: str
    params: Dict[str, float]
    fixed_point: List[float]
    residual: float
    leading_class: LeadingClass
    stability: Stability
    sigma1: float
    omega1: float
    reduced_period: Optional[float] = None
    a: List[float]
    b: List[float]
    eigenpairs: List[EigenpairModel]
    fingerprint: str

    model_config = ConfigDict(use_enum_values=True)
