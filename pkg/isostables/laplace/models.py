from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Union

import numpy as np

from isostables.dynamics.models import as_point

Scalar = Union[float, complex]

FD_STEP = 1e-5


class Status(str, Enum):
    CONVERGED = "Converged"
    DIVERGED = "Diverged"
    TRUNCATED = "Truncated"
    GUARDED = "Guarded"
    EXPERIMENTAL = "Experimental"


@dataclass(frozen=True, eq=False)
class Observable:
    """
    Scalar observable vanishing at the fixed point.

    The linear form is f(x) = g . (x - x*) + curvature * |x - x*|^2 with g the
    gradient at x*. A registered function replaces the closed form; its value at
    x* is subtracted so that f(x*) = 0 exactly.
    """

    gradient: np.ndarray
    center: np.ndarray
    curvature: float = 0.0
    function: Optional[Callable[[np.ndarray], Scalar]] = field(default=None, repr=False)
    offset: Scalar = 0.0

    @classmethod
    def linear(cls, gradient, center) -> "Observable":
        return cls(gradient=np.asarray(gradient), center=as_point(center))

    @classmethod
    def quadratic(cls, gradient, center, curvature: float) -> "Observable":
        return cls(gradient=np.asarray(gradient), center=as_point(center), curvature=float(curvature))

    @classmethod
    def from_function(cls, function: Callable[[np.ndarray], Scalar], center) -> "Observable":
        """Wrap a function, recording its central-difference gradient at x*."""
        center = as_point(center)
        gradient = np.empty(center.size)
        for i in range(center.size):
            h = FD_STEP * max(1.0, abs(center[i]))
            e = np.zeros(center.size)
            e[i] = h
            gradient[i] = (
                -function(center + 2 * e) + 8 * function(center + e)
                - 8 * function(center - e) + function(center - 2 * e)
            ) / (12 * h)
        return cls(gradient=gradient, center=center, function=function, offset=function(center))

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.gradient)

    def __call__(self, x: np.ndarray):
        """Evaluate at one point (shape (n,)) or a stack of points (shape (m, n))."""
        x = np.asarray(x, dtype=float)
        if self.function is not None:
            if x.ndim == 1:
                return self.function(x) - self.offset
            return np.array([self.function(row) for row in x]) - self.offset
        offset = x - self.center
        value = offset @ self.gradient
        if self.curvature:
            value = value + self.curvature * np.sum(offset * offset, axis=-1)
        return value

    def mode_factor(self, vector: np.ndarray) -> complex:
        """Koopman-mode factor grad f(x*) . v of the observable along an eigenvector."""
        return complex(np.dot(self.gradient, vector))


@dataclass(frozen=True)
class EigenfunctionValue:
    """
    Value of the leading Koopman eigenfunction s1 at a point.

    magnitude is |s1(x)| and does not depend on the observable. tau satisfies
    exp(sigma1 tau) = |s1| for a real leading eigenvalue and exp(sigma1 tau) = 2|s1|
    for a complex pair; it is +inf at the fixed point. phase is set for complex pairs.
    """

    magnitude: float
    tau: float
    status: Status
    value: complex = 0j
    phase: Optional[float] = None
    t_stop: Optional[float] = None
    reason: Optional[str] = None
    uncertainty: float = 0.0

    @classmethod
    def at_fixed_point(cls, complex_pair: bool) -> "EigenfunctionValue":
        return cls(magnitude=0.0, tau=np.inf, status=Status.CONVERGED, value=0j,
                   phase=0.0 if complex_pair else None, t_stop=0.0)

    @classmethod
    def diverged(cls, t_stop: Optional[float], reason: str) -> "EigenfunctionValue":
        return cls(magnitude=np.nan, tau=np.nan, status=Status.DIVERGED, value=complex(np.nan, np.nan),
                   phase=None, t_stop=t_stop, reason=reason, uncertainty=np.nan)

    @property
    def is_diverged(self) -> bool:
        return self.status is Status.DIVERGED


@dataclass(frozen=True)
class LaplaceAverage:
    """Finite-horizon Laplace average: raw `average` and the eigenfunction `value` it normalizes to."""

    average: complex
    value: complex
    status: Status
    t_stop: Optional[float] = None
    reason: Optional[str] = None

    @classmethod
    def diverged(cls, t_stop: Optional[float]) -> "LaplaceAverage":
        nan = complex(np.nan, np.nan)
        return cls(average=nan, value=nan, status=Status.DIVERGED, t_stop=t_stop)
