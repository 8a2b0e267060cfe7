from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


# ===============================================
# Request Schemas
# ===============================================

class ModelConfig(BaseModel):
    """Schema selecting a builtin model and its parameters"""
    model: str = Field(..., description="Registered model name: fitzhugh_nagumo, lorenz or linear")
    params: Dict[str, float] = Field(default_factory=dict, description="Named model parameters")
    matrix: Optional[List[List[float]]] = Field(None, description="System matrix of a linear model")
    domain: Optional[List[Tuple[float, float]]] = Field(None, description="Per-axis [min, max] domain box")
    guess: Optional[List[float]] = Field(None, description="Newton initial guess for the fixed point")
    attractors: List[List[float]] = Field(
        default_factory=list,
        description="Guesses for further attracting fixed points evaluated when a point leaves the primary basin",
    )

    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {
                "model": "fitzhugh_nagumo",
                "params": {"I": 0.05, "eps": 0.08, "gamma": 1.0, "a": 1.0},
                "guess": [0.0, 0.0],
            }
        },
    )

    @model_validator(mode="after")
    def check_domain(self) -> "ModelConfig":
        if self.domain is not None:
            for lo, hi in self.domain:
                if not lo < hi:
                    raise ValueError(f"domain axis [{lo}, {hi}] must satisfy min < max")
        if self.model == "linear" and self.matrix is None:
            raise ValueError("linear model requires 'matrix'")
        return self


# ===============================================
# Response Schemas
# ===============================================

class FixedPointReport(BaseModel):
    """Schema for the fixed-point command output"""
    model: str
    params: Dict[str, float]
    location: List[float]
    residual: float
    iterations: int
