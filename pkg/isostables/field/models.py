from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from isostables.field.schemas import GridSpec, Quantity
from isostables.laplace.models import Status


@dataclass(frozen=True, eq=False)
class ScalarField:
    """
    Per-point eigenfunction data on a grid. Arrays are in grid order; Diverged
    and Guarded points carry NaN magnitude, phase, tau and s1.
    """

    grid: GridSpec
    points: np.ndarray
    magnitude: np.ndarray
    phase: np.ndarray
    tau: np.ndarray
    status: np.ndarray
    s1: np.ndarray
    basin: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def values(self, quantity: Quantity) -> np.ndarray:
        return {
            Quantity.MAGNITUDE: self.magnitude,
            Quantity.PHASE: self.phase,
            Quantity.TAU: self.tau,
        }[Quantity(quantity)]

    def gridded(self, quantity: Quantity) -> np.ndarray:
        """Values reshaped to the regular grid ('ij' indexing)."""
        if not self.grid.is_regular:
            raise ValueError("scattered fields cannot be reshaped to a grid")
        return self.values(quantity).reshape(self.grid.shape)

    def counts(self) -> Dict[str, int]:
        return {status.value: int(np.sum(self.status == status.value)) for status in Status}


@dataclass(frozen=True)
class ContourSet:
    """Polylines per level (2D) or edge-crossing point clouds per level (3D)."""

    quantity: Quantity
    levels: List[float]
    polylines: List[List[np.ndarray]] = field(default_factory=list)
    point_clouds: List[np.ndarray] = field(default_factory=list)
    empty_levels: List[float] = field(default_factory=list)
    dim: int = 2


@dataclass(frozen=True, eq=False)
class LinearizedCoordinates:
    """
    Eigen-coordinates y_j = s_j(x) (NaN where unavailable), the linearizing
    change of coordinates z = V y relative to x* (None unless every y_j is
    available), and the action-angle pair (r, theta) of the leading eigenfunction.
    """

    y: np.ndarray
    z: Optional[np.ndarray]
    r: float
    theta: Optional[float]
    status: Status
