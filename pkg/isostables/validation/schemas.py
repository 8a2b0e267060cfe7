from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from isostables.core.config import settings

CheckName = Literal[
    "jacobian_consistency",
    "fixed_point_residual",
    "spectrum_biorthogonality",
    "spectrum_reconstruction",
    "tau_difference_anchor",
    "eigenfunction_semigroup",
    "phase_advance",
    "observable_independence",
    "local_linearization",
    "lyapunov_decay",
    "metric_contraction",
    "integral_limit_agreement",
    "linear_oracle",
    "generalized_oracle",
]


# ===============================================
# Request Schemas
# ===============================================

class TauAnchor(BaseModel):
    """Magnitudes on two isostables and the expected time between them"""
    v: float = Field(..., gt=0)
    v_prime: float = Field(..., gt=0)
    expected: float
    rel_tol: float = Field(0.05, gt=0)

    model_config = ConfigDict(extra="forbid")


class ValidateConfig(BaseModel):
    """Schema for the validate command"""
    samples: int = Field(20, ge=1, description="Random basin points per check")
    seed: int = Field(settings.RANDOM_SEED, description="Seed of every random draw in the suite")
    sample_radius: Optional[float] = Field(
        None, gt=0, description="Radius of the ball around x* the random points are drawn from; default 0.1 x domain diagonal"
    )
    near_radius: float = Field(1e-3, gt=0, description="Distance from x* used by the local linearization check")
    semigroup_times: List[float] = Field([1.0, 5.0, 10.0], description="Flow times of the semigroup check")
    lyapunov_times: List[float] = Field(
        [float(t) for t in range(11)], description="Sample times of the Lyapunov slope fit"
    )
    anchors: List[TauAnchor] = Field(default_factory=list, description="tau_difference anchors")
    random_systems: int = Field(0, ge=0, description="Random stable linear systems added to the oracle checks")
    random_dims: List[Literal[2, 3]] = Field([2, 3], description="Dimensions drawn for random systems")
    checks: Optional[List[CheckName]] = Field(None, description="Subset of checks to run; default all applicable")

    jacobian_tol: float = Field(1e-6, gt=0)
    biorthogonality_tol: float = Field(1e-10, gt=0)
    semigroup_tol: float = Field(1e-3, gt=0)
    phase_tol: float = Field(1e-3, gt=0)
    independence_tol: float = Field(1e-3, gt=0)
    local_tol: float = Field(1e-2, gt=0)
    lyapunov_tol: float = Field(1e-3, gt=0)
    integral_tol: float = Field(1e-2, gt=0)
    oracle_tol: float = Field(1e-6, gt=0)
    generalized_tol: float = Field(1e-4, gt=0)

    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {
                "samples": 20,
                "anchors": [{"v": 0.17, "v_prime": 1.74, "expected": 12.0}],
                "random_systems": 5,
            }
        },
    )


# ===============================================
# Response Schemas
# ===============================================

class CheckResult(BaseModel):
    """Outcome of one validation check"""
    name: str
    passed: bool
    measured: Optional[float] = Field(None, description="Worst measured discrepancy")
    tolerance: Optional[float] = None
    detail: Dict[str, Any] = Field(default_factory=dict)


class ValidationReport(BaseModel):
    """Schema for the validate command output"""
    model: str
    params: Dict[str, float]
    fingerprint: str
    passed: bool
    checks: List[CheckResult]
    created_at: Optional[str] = None

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]
