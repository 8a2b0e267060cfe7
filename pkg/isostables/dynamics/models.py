from abc import ABC, abstractmethod
from dataclasses import dataclass, field, fields
from typing import Callable, ClassVar, Dict, Optional, Sequence, Tuple

import numpy as np

Bounds = Tuple[Tuple[float, float], ...]


@dataclass(frozen=True, eq=False, kw_only=True)
class VectorFieldModel(ABC):
    """
    Autonomous vector field x' = F(x) on R^n.
    Concrete models are immutable and picklable so they can be shipped to worker processes.
    """

    name: ClassVar[str] = "model"

    domain: Optional[Bounds] = None
    guess: Optional[Tuple[float, ...]] = None

    @property
    @abstractmethod
    def dim(self) -> int:
        ...

    @abstractmethod
    def rhs(self, x: np.ndarray) -> np.ndarray:
        ...

    def jacobian(self, x: np.ndarray) -> Optional[np.ndarray]:
        """Analytic Jacobian, or None when only finite differences are available."""
        return None

    @property
    def has_jacobian(self) -> bool:
        return type(self).jacobian is not VectorFieldModel.jacobian

    @property
    def params(self) -> Dict[str, float]:
        skip = {"domain", "guess"}
        return {
            f.name: getattr(self, f.name)
            for f in fields(self)
            if f.name not in skip and isinstance(getattr(self, f.name), (int, float))
        }

    @property
    def bounds(self) -> np.ndarray:
        """Per-axis [min, max] of the configured domain box, shape (n, 2)."""
        if self.domain is not None:
            return np.asarray(self.domain, dtype=float)
        return self.default_domain()

    def default_domain(self) -> np.ndarray:
        return np.tile([-1.0, 1.0], (self.dim, 1))

    @property
    def domain_diagonal(self) -> float:
        bounds = self.bounds
        return float(np.linalg.norm(bounds[:, 1] - bounds[:, 0]))

    @property
    def default_guess(self) -> np.ndarray:
        if self.guess is not None:
            return np.asarray(self.guess, dtype=float)
        return np.zeros(self.dim)

    @property
    def is_linear(self) -> bool:
        return False


@dataclass(frozen=True, eq=False, kw_only=True)
class FixedPoint:
    location: np.ndarray
    residual: float
    iterations: int = 0


# ===============================================
# Builtin models
# ===============================================

@dataclass(frozen=True, eq=False, kw_only=True)
class FitzHughNagumo(VectorFieldModel):
    """v' = -w - v(v-1)(v-a) + I,  w' = eps (v - gamma w)"""

    name: ClassVar[str] = "fitzhugh_nagumo"

    I: float = 0.05
    eps: float = 0.08
    gamma: float = 1.0
    a: float = 1.0

    @property
    def dim(self) -> int:
        return 2

    def rhs(self, x: np.ndarray) -> np.ndarray:
        v, w = x
        return np.array([
            -w - v * (v - 1.0) * (v - self.a) + self.I,
            self.eps * (v - self.gamma * w),
        ])

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        v, _ = x
        return np.array([
            [-(3.0 * v * v - 2.0 * (1.0 + self.a) * v + self.a), -1.0],
            [self.eps, -self.eps * self.gamma],
        ])

    def default_domain(self) -> np.ndarray:
        return np.array([[-1.0, 2.0], [-1.0, 1.0]])


@dataclass(frozen=True, eq=False, kw_only=True)
class Lorenz(VectorFieldModel):
    """x1' = a(x2 - x1),  x2' = x1(rho - x3) - x2,  x3' = x1 x2 - b x3"""

    name: ClassVar[str] = "lorenz"

    a: float = 10.0
    rho: float = 0.5
    b: float = 8.0 / 3.0

    @property
    def dim(self) -> int:
        return 3

    def rhs(self, x: np.ndarray) -> np.ndarray:
        x1, x2, x3 = x
        return np.array([
            self.a * (x2 - x1),
            x1 * (self.rho - x3) - x2,
            x1 * x2 - self.b * x3,
        ])

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        x1, x2, x3 = x
        return np.array([
            [-self.a, self.a, 0.0],
            [self.rho - x3, -1.0, -x1],
            [x2, x1, -self.b],
        ])

    def default_domain(self) -> np.ndarray:
        return np.tile([-3.0, 3.0], (3, 1))

    @property
    def default_guess(self) -> np.ndarray:
        if self.guess is not None:
            return np.asarray(self.guess, dtype=float)
        return np.full(3, 1.0 if self.rho > 1.0 else 0.1)


@dataclass(frozen=True, eq=False, kw_only=True)
class LinearSystem(VectorFieldModel):
    name: ClassVar[str] = "linear"

    matrix: np.ndarray = field(default_factory=lambda: -np.eye(2))

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError("linear model needs a square matrix")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def params(self) -> Dict[str, float]:
        return {}

    @property
    def is_linear(self) -> bool:
        return True

    def rhs(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=float)

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        return np.array(self.matrix)


@dataclass(frozen=True, eq=False, kw_only=True)
class CallableModel(VectorFieldModel):
    """
    Model built from plain callables. Use module-level functions if the model is
    evaluated on more than one worker.
    """

    name: ClassVar[str] = "callable"

    n: int
    field_fn: Callable[[np.ndarray], np.ndarray]
    jacobian_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @property
    def dim(self) -> int:
        return self.n

    @property
    def has_jacobian(self) -> bool:
        return self.jacobian_fn is not None

    def rhs(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.field_fn(np.asarray(x, dtype=float)), dtype=float)

    def jacobian(self, x: np.ndarray) -> Optional[np.ndarray]:
        if self.jacobian_fn is None:
            return None
        return np.asarray(self.jacobian_fn(np.asarray(x, dtype=float)), dtype=float)


@dataclass(frozen=True, eq=False, kw_only=True)
class TimeReversed(VectorFieldModel):
    """The field -F(x); forward flow of this model is backward flow of `base`."""

    name: ClassVar[str] = "time_reversed"

    base: VectorFieldModel

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def has_jacobian(self) -> bool:
        return self.base.has_jacobian

    @property
    def bounds(self) -> np.ndarray:
        return self.base.bounds

    @property
    def is_linear(self) -> bool:
        return self.base.is_linear

    def rhs(self, x: np.ndarray) -> np.ndarray:
        return -self.base.rhs(x)

    def jacobian(self, x: np.ndarray) -> Optional[np.ndarray]:
        jac = self.base.jacobian(x)
        return None if jac is None else -jac


MODEL_REGISTRY: Dict[str, type] = {
    FitzHughNagumo.name: FitzHughNagumo,
    Lorenz.name: Lorenz,
    LinearSystem.name: LinearSystem,
}


def as_point(x: Sequence[float]) -> np.ndarray:
    return np.asarray(x, dtype=float).reshape(-1)
