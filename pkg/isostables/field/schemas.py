from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class Quantity(str, Enum):
    MAGNITUDE = "magnitude"
    PHASE = "phase"
    TAU = "tau"


# ===============================================
# Request Schemas
# ===============================================

class GridSpec(BaseModel):
    """
    Sample points of a field: a regular grid from bounds and resolution, or an
    explicit list of points.
    """
    bounds: Optional[List[Tuple[float, float]]] = Field(None, description="Per-axis [min, max]")
    resolution: Optional[List[int]] = Field(None, description="Per-axis point counts")
    points: Optional[List[List[float]]] = Field(None, description="Explicit sample points")

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        json_schema_extra={
            "example": {
                "bounds": [[-1.0, 2.0], [-1.0, 1.0]],
                "resolution": [100, 100],
            }
        },
    )

    @model_validator(mode="after")
    def check_layout(self) -> "GridSpec":
        if self.points is not None:
            if self.bounds is not None or self.resolution is not None:
                raise ValueError("give either 'points' or 'bounds' with 'resolution', not both")
            if not self.points:
                raise ValueError("'points' must not be empty")
            if len({len(point) for point in self.points}) != 1:
                raise ValueError("all points must have the same dimension")
            return self
        if self.bounds is None or self.resolution is None:
            raise ValueError("a regular grid needs 'bounds' and 'resolution'")
        if len(self.bounds) != len(self.resolution):
            raise ValueError("'bounds' and 'resolution' must have one entry per axis")
        if len(self.bounds) not in (2, 3):
            raise ValueError("regular grids are two- or three-dimensional")
        for (lo, hi), count in zip(self.bounds, self.resolution):
            if not lo < hi:
                raise ValueError(f"axis [{lo}, {hi}] must satisfy min < max")
            if count < 2:
                raise ValueError("resolution must be at least 2 per axis")
        return self

    @property
    def is_regular(self) -> bool:
        return self.points is None

    @property
    def dim(self) -> int:
        return len(self.points[0]) if self.points is not None else len(self.bounds)

    @property
    def shape(self) -> Tuple[int, ...]:
        if self.points is not None:
            return (len(self.points),)
        return tuple(self.resolution)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def axes(self) -> List[np.ndarray]:
        if not self.is_regular:
            raise ValueError("scattered points have no axes")
        return [np.linspace(lo, hi, count) for (lo, hi), count in zip(self.bounds, self.resolution)]

    def sample_points(self) -> np.ndarray:
        """Points in C order of the grid ('ij' indexing), shape (size, dim)."""
        if self.points is not None:
            return np.asarray(self.points, dtype=float)
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([axis.ravel() for axis in mesh], axis=1)


class FieldConfig(BaseModel):
    """Schema for the field command"""
    quantity: Quantity = Field(Quantity.MAGNITUDE, description="Quantity the summary reports on")
    output: Optional[str] = Field(None, description="Output CSV path; the JSON header goes next to it")

    model_config = ConfigDict(extra="forbid")


class ContourConfig(BaseModel):
    """Schema for the contour command"""
    quantity: Quantity = Field(Quantity.MAGNITUDE, description="Field column to contour")
    levels: Optional[List[float]] = Field(None, description="Explicit levels")
    n_levels: Optional[int] = Field(None, ge=1, description="Evenly spaced levels (phase: over [0, 2 pi))")

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def check_levels(self) -> "ContourConfig":
        if self.levels is None and self.n_levels is None:
            raise ValueError("contour needs 'levels' or 'n_levels'")
        return self


# ===============================================
# Response Schemas
# ===============================================

class FieldSummary(BaseModel):
    """Schema for the field command summary"""
    points: int
    converged: int
    truncated: int
    diverged: int
    guarded: int = 0
    experimental: int = 0
    wall_time: float
    csv: str
    header: str
