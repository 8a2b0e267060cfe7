import hashlib
from dataclasses import dataclass
from enum import Enum

import numpy as np

from isostables.dynamics.models import FixedPoint


class LeadingClass(str, Enum):
    REAL = "Real"
    COMPLEX_PAIR = "ComplexPair"


class Stability(str, Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"


@dataclass(frozen=True, eq=False)
class Spectrum:
    """
    Eigen-decomposition of the Jacobian at a hyperbolic fixed point.

    Columns of `right_vectors` are the unit eigenvectors v_j, columns of
    `left_vectors` the adjoint vectors w_j normalized so that <v_j, w_j> = 1 with
    <x, y> = sum(x * conj(y)). Eigenvalues are ordered slowest first: by
    decreasing real part for a sink, increasing real part for a source. Within a
    conjugate pair the member with positive imaginary part comes first.
    """

    fixed_point: FixedPoint
    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    leading_class: LeadingClass
    stability: Stability
    jacobian: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @property
    def center(self) -> np.ndarray:
        return self.fixed_point.location

    @property
    def lambda1(self) -> complex:
        return complex(self.eigenvalues[0])

    @property
    def sigma1(self) -> float:
        return self.lambda1.real

    @property
    def omega1(self) -> float:
        return abs(self.lambda1.imag)

    @property
    def v1(self) -> np.ndarray:
        return self.right_vectors[:, 0]

    @property
    def w1(self) -> np.ndarray:
        return self.left_vectors[:, 0]

    @property
    def a(self) -> np.ndarray:
        """Re v1"""
        return self.v1.real.copy()

    @property
    def b(self) -> np.ndarray:
        """-Im v1"""
        return -self.v1.imag

    @property
    def time_sign(self) -> int:
        """+1 for a sink, -1 for a source (flow is followed backward)."""
        return 1 if self.stability is Stability.STABLE else -1

    @property
    def effective_lambda1(self) -> complex:
        return self.time_sign * self.lambda1

    @property
    def effective_sigma1(self) -> float:
        return self.effective_lambda1.real

    @property
    def effective_omega1(self) -> float:
        return self.effective_lambda1.imag

    def effective_lambda(self, j: int) -> complex:
        return self.time_sign * complex(self.eigenvalues[j - 1])

    def project(self, x, j: int = 1) -> complex:
        """Linear eigenfunction approximation s_j(x) ~ <x - x*, w_j>."""
        offset = np.asarray(x, dtype=float) - self.center
        return complex(np.vdot(self.left_vectors[:, j - 1], offset))

    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        for array in (self.center, self.eigenvalues, self.right_vectors, self.left_vectors):
            digest.update(np.round(np.asarray(array, dtype=complex), 12).tobytes())
        digest.update(self.leading_class.value.encode())
        digest.update(self.stability.value.encode())
        return digest.hexdigest()[:16]
