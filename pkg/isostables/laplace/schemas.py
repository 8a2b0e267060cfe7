from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from isostables.core.config import settings
from isostables.flow.schemas import IntegrationOptions


# ===============================================
# Request Schemas
# ===============================================

class LaplaceOptions(BaseModel):
    """Schema for Laplace-average evaluation options"""
    convergence_tol: float = Field(settings.CONVERGENCE_TOL, gt=0, description="Relative change declaring convergence")
    window: int = Field(3, ge=1, description="Consecutive checkpoints below convergence_tol")
    guard_activation: float = Field(
        settings.GUARD_ACTIVATION, gt=0, description="Relative change below which the instability guard is armed"
    )
    guard_patience: int = Field(2, ge=1, description="Consecutive increases of the relative change that stop the run")
    extrapolation_passes: int = Field(
        settings.EXTRAPOLATION_PASSES, ge=0, le=4,
        description="Richardson passes removing the exp(k sigma1 t) transients; 0 gives the plain limit",
    )
    magnitude_floor: float = Field(1e-14, gt=0, description="Denominator floor of the relative change")
    capture_radius: Optional[float] = Field(
        None, gt=0, description="Final distance from x* beyond which a point is outside the basin"
    )
    observable: Optional[List[float]] = Field(
        None, description="Gradient of a linear observable for the real case; default is the left eigenvector"
    )
    pair_mode: Literal["span", "spectral"] = Field("span", description="Observable pair for a complex leading pair")
    method: Literal["limit", "integral"] = Field("limit", description="Limit form or finite-horizon integral form")
    generalized_horizon: Optional[float] = Field(
        None, gt=0, description="Horizon of the second-eigenfunction average; default 5/|sigma2|"
    )
    allow_experimental: bool = Field(False, description="Accept second-eigenfunction averages of nonlinear models")
    integration: IntegrationOptions = Field(default_factory=IntegrationOptions)

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        json_schema_extra={
            "example": {
                "convergence_tol": 1e-6,
                "window": 3,
                "guard_activation": 1e-3,
                "guard_patience": 2,
                "extrapolation_passes": 2,
                "pair_mode": "span",
                "method": "limit",
            }
        },
    )
