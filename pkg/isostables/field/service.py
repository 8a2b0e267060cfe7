import logging
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from isostables.core.errors import DimensionMismatch, Diverged, GuardTriggered, LeadingClassMismatch
from isostables.dynamics.models import VectorFieldModel, as_point
from isostables.field.models import LinearizedCoordinates, ScalarField
from isostables.field.schemas import GridSpec, Quantity
from isostables.flow.service import flow_service
from isostables.laplace.models import EigenfunctionValue, Status
from isostables.laplace.schemas import LaplaceOptions
from isostables.laplace.service import laplace_service
from isostables.spectrum.models import LeadingClass, Spectrum

logger = logging.getLogger(__name__)

# magnitude, phase, tau, status, s1, basin
PointRecord = Tuple[float, float, float, str, complex, int]

BLOCKS_PER_WORKER = 4


def _evaluate_point(model: VectorFieldModel, spectra: Sequence[Spectrum], point: np.ndarray,
                    opts: LaplaceOptions) -> PointRecord:
    """
    Try each attracting fixed point in turn; the first basin that holds the point
    wins. Only per-point outcomes are absorbed here; every other error reaches the
    caller.
    """
    nan = float("nan")
    guarded: Optional[int] = None
    for basin, spectrum in enumerate(spectra):
        try:
            value = laplace_service.eigenfunction(model, spectrum, point, opts)
        except Diverged:
            continue
        except GuardTriggered:
            logger.debug(f"Guard stopped point {point} against fixed point {basin} before any estimate")
            guarded = basin if guarded is None else guarded
            continue
        if value.is_diverged:
            continue
        phase = value.phase if value.phase is not None else np.nan
        return value.magnitude, phase, value.tau, value.status.value, value.value, basin
    if guarded is not None:
        return nan, nan, nan, Status.GUARDED.value, complex(nan, nan), guarded
    return nan, nan, nan, Status.DIVERGED.value, complex(nan, nan), -1


def _evaluate_block(payload) -> List[PointRecord]:
    model, spectra, points, opts = payload
    return [_evaluate_point(model, spectra, point, opts) for point in points]


class FieldService:
    """Service class for eigenfunction fields and the coordinates derived from them"""

    def evaluate_field(self, model: VectorFieldModel, spectrum: Spectrum, grid: GridSpec,
                       quantity: Quantity = Quantity.MAGNITUDE, opts: Optional[LaplaceOptions] = None,
                       workers: int = 1, extra_spectra: Sequence[Spectrum] = ()) -> ScalarField:
        """
        Evaluate s1 at every grid point. Points are split into contiguous blocks
        mapped over worker processes and gathered in block order, so the result
        does not depend on the worker count. A point outside the basin of
        `spectrum` is retried against each of `extra_spectra`.
        """
        opts = opts or LaplaceOptions()
        if grid.dim != model.dim:
            raise DimensionMismatch("grid dimension does not match the model", expected=model.dim, received=grid.dim)
        points = grid.sample_points()
        bounds = model.bounds
        if np.any(points < bounds[:, 0]) or np.any(points > bounds[:, 1]):
            logger.warning(f"Some grid points of {model.name} lie outside the model domain")

        spectra = [spectrum, *extra_spectra]
        for attractor in spectra:
            laplace_service.check_observable(attractor, opts)
        workers = max(1, min(int(workers), len(points)))
        if workers == 1:
            records = _evaluate_block((model, spectra, points, opts))
        else:
            blocks = np.array_split(points, min(len(points), workers * BLOCKS_PER_WORKER))
            payloads = [(model, spectra, block, opts) for block in blocks]
            with ProcessPoolExecutor(max_workers=workers) as executor:
                records = [record for block in executor.map(_evaluate_block, payloads) for record in block]

        magnitude, phase, tau, status, s1, basin = (np.asarray(column) for column in zip(*records))
        field = ScalarField(
            grid=grid,
            points=points,
            magnitude=magnitude.astype(float),
            phase=phase.astype(float),
            tau=tau.astype(float),
            status=status.astype(str),
            s1=s1.astype(complex),
            basin=basin.astype(int),
            metadata={
                "model": model.name,
                "params": model.params,
                "quantity": Quantity(quantity).value,
                "fingerprint": spectrum.fingerprint(),
                "fixed_points": [s.center.tolist() for s in spectra],
                "leading_class": spectrum.leading_class.value,
                "sigma1": spectrum.sigma1,
                "omega1": spectrum.omega1,
                "opts": opts.model_dump(mode="json"),
            },
        )
        logger.info(f"Field of {len(points)} points on {workers} worker(s): {field.counts()}")
        return field

    def linearize_point(self, model: VectorFieldModel, spectrum: Spectrum, x,
                        opts: Optional[LaplaceOptions] = None) -> LinearizedCoordinates:
        """
        y1 = s1(x); y2 = conj(s1) for a complex pair, or the second eigenfunction of
        a linear model; z = V y (relative to x*) once every y_j is known.
        """
        opts = opts or LaplaceOptions()
        n = spectrum.dim
        y = np.full(n, complex(np.nan, np.nan))
        first = laplace_service.eigenfunction(model, spectrum, x, opts)
        if first.is_diverged:
            return LinearizedCoordinates(y=y, z=None, r=np.nan, theta=None, status=first.status)

        y[0] = first.value
        complex_pair = spectrum.leading_class is LeadingClass.COMPLEX_PAIR
        if complex_pair:
            y[1] = np.conj(first.value)
        elif n >= 2 and model.is_linear:
            y[1] = laplace_service.generalized_laplace_average(model, spectrum, None, x, 2, None, opts).value

        z = (spectrum.right_vectors @ y).real if np.all(np.isfinite(y)) else None
        return LinearizedCoordinates(
            y=y,
            z=z,
            r=first.magnitude,
            theta=first.phase if complex_pair else None,
            status=first.status,
        )

    def linearized_field(self, field: ScalarField, spectrum: Spectrum) -> np.ndarray:
        """z = 2 Re(s1 v1) at every field point of a planar spiral; NaN where Diverged."""
        if spectrum.leading_class is not LeadingClass.COMPLEX_PAIR or spectrum.dim != 2:
            raise LeadingClassMismatch("Linearized fields need a planar complex pair")
        return 2.0 * (field.s1[:, None] * spectrum.v1[None, :]).real

    def lyapunov_value(self, model: VectorFieldModel, spectrum: Spectrum, x,
                       opts: Optional[LaplaceOptions] = None) -> float:
        """V(x) = |s1(x)|, decreasing as exp(sigma1 t) along trajectories"""
        self._check_lyapunov_case(spectrum)
        return self._magnitude(model, spectrum, x, opts)

    def contraction_distance(self, model: VectorFieldModel, spectrum: Spectrum, x, x_prime,
                             opts: Optional[LaplaceOptions] = None) -> float:
        """d(x, x') = |s1(x) - s1(x')|"""
        first = laplace_service.eigenfunction(model, spectrum, x, opts)
        second = laplace_service.eigenfunction(model, spectrum, x_prime, opts)
        return float(abs(first.value - second.value))

    def lyapunov_slope(self, model: VectorFieldModel, spectrum: Spectrum, x, times: Sequence[float],
                       opts: Optional[LaplaceOptions] = None) -> float:
        """
        Least-squares slope of ln V along the trajectory from x, over the Converged
        samples. The slope estimates the effective sigma1 (time runs backward for a source).
        """
        opts = opts or LaplaceOptions()
        self._check_lyapunov_case(spectrum)
        trajectory = flow_service.sample_trajectory(
            model, as_point(x), times, laplace_service.integration_options(spectrum, opts), center=spectrum.center
        )
        values = [laplace_service.eigenfunction(model, spectrum, state, opts) for state in trajectory.states]
        usable = [
            (t, value.magnitude) for t, value in zip(trajectory.times, values)
            if value.status is Status.CONVERGED and value.magnitude > 0
        ]
        if len(usable) < 2:
            usable = [
                (t, value.magnitude) for t, value in zip(trajectory.times, values)
                if not value.is_diverged and value.magnitude > 0
            ]
        if len(usable) < 2:
            return float("nan")
        t, magnitude = np.array(usable).T
        return float(np.polyfit(t, np.log(magnitude), 1)[0])

    def _magnitude(self, model: VectorFieldModel, spectrum: Spectrum, x, opts: Optional[LaplaceOptions]) -> float:
        value: EigenfunctionValue = laplace_service.eigenfunction(model, spectrum, x, opts)
        return value.magnitude

    def _check_lyapunov_case(self, spectrum: Spectrum) -> None:
        if spectrum.dim != 2 or spectrum.leading_class is not LeadingClass.COMPLEX_PAIR:
            logger.warning("|s1| is a Lyapunov function only up to the other eigenfunctions outside the planar spiral case")


field_service = FieldService()
