import math
from enum import Enum
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from isostables.core.config import settings


class Direction(str, Enum):
    FORWARD = "Forward"
    BACKWARD = "Backward"


# ===============================================
# Request Schemas
# ===============================================

class IntegrationOptions(BaseModel):
    """Schema for trajectory integration options"""
    rel_tol: float = Field(settings.REL_TOL, gt=0, description="Relative tolerance per step")
    abs_tol: float = Field(settings.ABS_TOL, gt=0, description="Absolute tolerance per step (state units)")
    max_step: float = Field(math.inf, gt=0, description="Largest allowed step (time)")
    horizon: float = Field(settings.HORIZON, gt=0, description="Integration horizon T (time)")
    direction: Direction = Field(Direction.FORWARD, description="Forward or Backward in time")
    escape_radius: Optional[float] = Field(
        None, gt=0, description="Distance from the fixed point treated as leaving the basin; default 1e3 x domain diagonal"
    )
    method: Literal["DOP853", "RK45"] = Field(settings.INTEGRATOR, description="Embedded Runge-Kutta pair")

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        json_schema_extra={
            "example": {
                "rel_tol": 1e-12,
                "abs_tol": 1e-12,
                "horizon": 50.0,
                "direction": "Forward",
                "method": "DOP853",
            }
        },
    )


class TrajectoryConfig(BaseModel):
    """Schema for the trajectory command"""
    x0: List[float] = Field(..., description="Initial condition")
    times: Optional[List[float]] = Field(None, description="Explicit sample times")
    t_end: Optional[float] = Field(None, gt=0, description="Final time when sampling uniformly")
    samples: int = Field(101, ge=2, description="Number of uniform samples on [0, t_end]")

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def check_times(self) -> "TrajectoryConfig":
        if self.times is None and self.t_end is None:
            raise ValueError("trajectory needs 'times' or 't_end'")
        if self.times is not None:
            if any(t < 0 for t in self.times):
                raise ValueError("sample times must be non-negative")
            if any(b <= a for a, b in zip(self.times, self.times[1:])):
                raise ValueError("sample times must be strictly increasing")
        return self
