import logging
import math

import numpy as np
import scipy.linalg

from isostables.core.errors import (
    MixedStability,
    Nonhyperbolic,
    RealLeadingEigenvalue,
    RepeatedEigenvalue,
)
from isostables.dynamics.models import FixedPoint, VectorFieldModel
from isostables.dynamics.service import dynamics_service
from isostables.spectrum.models import LeadingClass, Spectrum, Stability
from isostables.spectrum.schemas import EigenpairModel, SpectrumReport

logger = logging.getLogger(__name__)

HYPERBOLIC_TOL = 1e-10
REPEATED_TOL = 1e-8


def _fix_phase(vector: np.ndarray) -> np.ndarray:
    """Unit norm, largest-magnitude component real and positive."""
    vector = vector / np.linalg.norm(vector)
    k = int(np.argmax(np.abs(vector)))
    return vector * (np.conj(vector[k]) / abs(vector[k]))


def _dual(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    # rescale so that <right, left> = sum(right * conj(left)) = 1
    return left / np.conj(np.vdot(left, right))


class SpectrumService:
    """Service class for the Jacobian spectrum at a fixed point"""

    def compute_spectrum(self, model: VectorFieldModel, fp: FixedPoint) -> Spectrum:
        jacobian = dynamics_service.jacobian_at(model, fp.location)
        eigenvalues, left, right = scipy.linalg.eig(jacobian, left=True, right=True)
        eigenvalues = np.asarray(eigenvalues, dtype=complex)

        sigma = eigenvalues.real
        if np.any(np.abs(sigma) < HYPERBOLIC_TOL):
            raise Nonhyperbolic(eigenvalues=eigenvalues)
        if np.any(sigma < 0) and np.any(sigma > 0):
            raise MixedStability(eigenvalues=eigenvalues)

        radius = float(np.max(np.abs(eigenvalues)))
        gaps = np.abs(eigenvalues[:, None] - eigenvalues[None, :])
        gaps[np.diag_indices_from(gaps)] = np.inf
        if np.min(gaps) < REPEATED_TOL * radius:
            raise RepeatedEigenvalue(eigenvalues=eigenvalues, min_gap=float(np.min(gaps)))

        stability = Stability.STABLE if np.all(sigma < 0) else Stability.UNSTABLE
        if stability is Stability.STABLE:
            order = np.lexsort((-eigenvalues.imag, -eigenvalues.real))
        else:
            order = np.lexsort((-eigenvalues.imag, eigenvalues.real))
        eigenvalues = eigenvalues[order]
        right = np.asarray(right[:, order], dtype=complex)
        left = np.asarray(left[:, order], dtype=complex)

        n = eigenvalues.size
        j = 0
        while j < n:
            right[:, j] = _fix_phase(right[:, j])
            left[:, j] = _dual(left[:, j], right[:, j])
            if eigenvalues[j].imag > 0 and j + 1 < n:
                # the partner is the exact conjugate
                eigenvalues[j + 1] = np.conj(eigenvalues[j])
                right[:, j + 1] = np.conj(right[:, j])
                left[:, j + 1] = np.conj(left[:, j])
                j += 2
            else:
                if eigenvalues[j].imag == 0:
                    right[:, j] = right[:, j].real
                    left[:, j] = left[:, j].real
                j += 1

        leading_class = LeadingClass.COMPLEX_PAIR if eigenvalues[0].imag != 0 else LeadingClass.REAL
        logger.debug(f"Spectrum of {model.name}: {eigenvalues}, leading class {leading_class.value}")

        for array in (eigenvalues, right, left, jacobian):
            array.setflags(write=False)
        return Spectrum(
            fixed_point=fp,
            eigenvalues=eigenvalues,
            right_vectors=right,
            left_vectors=left,
            leading_class=leading_class,
            stability=stability,
            jacobian=jacobian,
        )

    def reduced_period(self, spectrum: Spectrum) -> float:
        """T1 = 2 pi / omega1 of a spiral fixed point"""
        if spectrum.leading_class is not LeadingClass.COMPLEX_PAIR:
            raise RealLeadingEigenvalue(eigenvalue=spectrum.lambda1)
        return 2.0 * math.pi / spectrum.omega1

    def report(self, model: VectorFieldModel, spectrum: Spectrum) -> SpectrumReport:
        period = None
        if spectrum.leading_class is LeadingClass.COMPLEX_PAIR:
            period = self.reduced_period(spectrum)
        return SpectrumReport(
            model=model.name,
            params=model.params,
            fixed_point=spectrum.center.tolist(),
            residual=spectrum.fixed_point.residual,
            leading_class=spectrum.leading_class,
            stability=spectrum.stability,
            sigma1=spectrum.sigma1,
            omega1=spectrum.omega1,
            reduced_period=period,
            a=spectrum.a.tolist(),
            b=spectrum.b.tolist(),
            eigenpairs=[
                EigenpairModel(
                    index=j + 1,
                    eigenvalue=complex(spectrum.eigenvalues[j]),
                    right_vector=[complex(c) for c in spectrum.right_vectors[:, j]],
                    left_vector=[complex(c) for c in spectrum.left_vectors[:, j]],
                )
                for j in range(spectrum.dim)
            ],
            fingerprint=spectrum.fingerprint(),
        )


spectrum_service = SpectrumService()
