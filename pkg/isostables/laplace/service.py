import cmath
import logging
import math
from typing import Callable, Iterator, Optional, Sequence, Tuple

import numpy as np

from isostables.core.config import settings
from isostables.core.errors import (
    DegenerateSpan,
    DimensionMismatch,
    Escaped,
    ExperimentalResult,
    GuardTriggered,
    HigherModeResidual,
    LeadingClassMismatch,
    Stalled,
    SubtractionLoss,
    UnsupportedEigenfunction,
    ZeroMagnitude,
    ZeroProjection,
)
from isostables.dynamics.models import VectorFieldModel, as_point
from isostables.flow.schemas import Direction, IntegrationOptions
from isostables.flow.service import flow_service
from isostables.laplace.models import EigenfunctionValue, LaplaceAverage, Observable, Status
from isostables.laplace.monitor import ConvergenceMonitor, RichardsonAccelerator, Verdict
from isostables.laplace.schemas import LaplaceOptions
from isostables.spectrum.models import LeadingClass, Spectrum
from isostables.spectrum.service import spectrum_service

logger = logging.getLogger(__name__)

PROJECTION_TOL = 1e-8
DEGENERATE_ANGLE = 1e-6
SUBTRACTION_TOL = 1e-3
CHECKPOINTS_PER_HORIZON = 50
GENERALIZED_DECAY_TIMES = 5.0

GAUSS_NODES, GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(8)


class LaplaceService:
    """Service class for Koopman eigenfunctions computed from Laplace averages"""

    # ===============================================
    # Observables
    # ===============================================

    def default_observable(self, spectrum: Spectrum, j: int = 1) -> Observable:
        """Linear observable dual to v_j: f(x) = <x - x*, w_j>, so grad f . v_j = 1."""
        gradient = np.conj(spectrum.left_vectors[:, j - 1])
        if np.all(gradient.imag == 0):
            gradient = gradient.real
        return Observable.linear(gradient, spectrum.center)

    def build_observable_pair(self, spectrum: Spectrum, mode: str = "span") -> Tuple[Observable, Observable]:
        """
        Linear observables (f1, f2) with <g1, a> = <g2, b> = 1 and <g1, b> = <g2, a> = 0,
        where a = Re v1 and b = -Im v1. In "span" mode the gradients lie in span{a, b};
        in "spectral" mode they are 2 Re w1 and -2 Im w1, which also annihilate the
        remaining eigenvectors.
        """
        if spectrum.leading_class is not LeadingClass.COMPLEX_PAIR:
            raise LeadingClassMismatch("Observable pairs need a complex leading pair",
                                       leading_class=spectrum.leading_class.value)
        a, b = spectrum.a, spectrum.b
        cos_angle = abs(a @ b) / (np.linalg.norm(a) * np.linalg.norm(b))
        angle = math.acos(min(1.0, cos_angle))
        if angle < DEGENERATE_ANGLE:
            raise DegenerateSpan(angle=angle)

        if mode == "spectral":
            g1 = 2.0 * spectrum.w1.real
            g2 = -2.0 * spectrum.w1.imag
        elif mode == "span":
            basis = np.column_stack([a, b])
            coefficients = np.linalg.solve(basis.T @ basis, np.eye(2))
            g1, g2 = basis @ coefficients[:, 0], basis @ coefficients[:, 1]
        else:
            raise ValueError(f"unknown observable pair mode '{mode}'")
        return Observable.linear(g1, spectrum.center), Observable.linear(g2, spectrum.center)

    def check_observable(self, spectrum: Spectrum, opts: LaplaceOptions) -> None:
        """Raise the errors of the configured observable once, before any trajectory is integrated."""
        if opts.method == "integral" or spectrum.leading_class is LeadingClass.REAL:
            self._mode_factor(self._configured_observable(spectrum, opts), spectrum.v1)
            return
        f1, _ = self.build_observable_pair(spectrum, opts.pair_mode)
        self._pair_scale(f1, spectrum)

    # ===============================================
    # Limit forms
    # ===============================================

    def eigenfunction_real(self, model: VectorFieldModel, spectrum: Spectrum, f: Optional[Observable], x,
                           opts: Optional[LaplaceOptions] = None) -> EigenfunctionValue:
        """
        |s1(x)| for a real leading eigenvalue from the limit of
        exp(-sigma1 t) f(phi_t(x)), normalized by grad f(x*) . v1.
        """
        if spectrum.leading_class is not LeadingClass.REAL:
            raise LeadingClassMismatch("eigenfunction_real needs a real leading eigenvalue")
        opts = opts or LaplaceOptions()
        f = f or self._configured_observable(spectrum, opts)
        factor = self._mode_factor(f, spectrum.v1)
        x = self._check_point(model, x)
        if np.array_equal(x, spectrum.center):
            return EigenfunctionValue.at_fixed_point(complex_pair=False)

        sigma = spectrum.effective_sigma1
        horizon = opts.integration.horizon
        delta = min(1.0 / abs(sigma), horizon / CHECKPOINTS_PER_HORIZON)
        times = delta * np.arange(0, math.floor(horizon / delta + 1e-9) + 1)

        def term(t: float, state: np.ndarray) -> complex:
            return math.exp(-sigma * t) * complex(f(state))

        verdict = self._limit(model, spectrum, x, times, term, math.exp(sigma * delta), opts)
        if isinstance(verdict, EigenfunctionValue):
            return verdict

        value = verdict.value / factor
        if not f.is_complex:
            value = complex(value.real, 0.0)
        magnitude = abs(value)
        return EigenfunctionValue(
            magnitude=magnitude,
            tau=math.log(magnitude) / sigma if magnitude > 0 else math.inf,
            status=verdict.status,
            value=value,
            t_stop=verdict.time,
            reason=verdict.reason,
            uncertainty=verdict.abs_change / abs(factor),
        )

    def eigenfunction_complex(self, model: VectorFieldModel, spectrum: Spectrum, x,
                              opts: Optional[LaplaceOptions] = None,
                              observables: Optional[Tuple[Observable, Observable]] = None) -> EigenfunctionValue:
        """
        |s1(x)| and angle s1(x) for a complex leading pair from the time-T1 map:
        z_n = exp(-sigma1 n T1) (f1 + i f2)(phi_{n T1}(x)) tends to 2 <g1, a> s1(x).
        """
        if spectrum.leading_class is not LeadingClass.COMPLEX_PAIR:
            raise LeadingClassMismatch("eigenfunction_complex needs a complex leading pair")
        opts = opts or LaplaceOptions()
        f1, f2 = observables or self.build_observable_pair(spectrum, opts.pair_mode)
        scale = self._pair_scale(f1, spectrum)
        x = self._check_point(model, x)
        if np.array_equal(x, spectrum.center):
            return EigenfunctionValue.at_fixed_point(complex_pair=True)

        sigma, omega = spectrum.effective_sigma1, spectrum.effective_omega1
        period = spectrum_service.reduced_period(spectrum)
        horizon = opts.integration.horizon
        times = period * np.arange(0, math.floor(horizon / period + 1e-9) + 1)

        def term(t: float, state: np.ndarray) -> complex:
            # exp(-i omega t) is 1 on the checkpoints up to rounding; it keeps the phase referred to t = 0
            return cmath.exp(-(sigma + 1j * omega) * t) * complex(f1(state) + 1j * f2(state))

        verdict = self._limit(model, spectrum, x, times, term, math.exp(sigma * period), opts)
        if isinstance(verdict, EigenfunctionValue):
            return verdict

        value = verdict.value / (2.0 * scale)
        magnitude = abs(value)
        return EigenfunctionValue(
            magnitude=magnitude,
            tau=math.log(2.0 * magnitude) / sigma if magnitude > 0 else math.inf,
            status=verdict.status,
            value=value,
            phase=float(np.angle(value)) % (2.0 * math.pi),
            t_stop=verdict.time,
            reason=verdict.reason,
            uncertainty=verdict.abs_change / (2.0 * abs(scale)),
        )

    def eigenfunction(self, model: VectorFieldModel, spectrum: Spectrum, x,
                      opts: Optional[LaplaceOptions] = None, observable: Optional[Observable] = None) -> EigenfunctionValue:
        """Dispatch on the leading class, or to the integral form when opts.method is 'integral'."""
        opts = opts or LaplaceOptions()
        complex_pair = spectrum.leading_class is LeadingClass.COMPLEX_PAIR
        if opts.method == "integral":
            average = self.laplace_average_integral(model, spectrum, observable, x, None, opts)
            if average.status is Status.DIVERGED:
                return EigenfunctionValue.diverged(average.t_stop, "integral")
            value = complex(average.value)
            magnitude = abs(value)
            scale = 2.0 if complex_pair else 1.0
            return EigenfunctionValue(
                magnitude=magnitude,
                tau=math.log(scale * magnitude) / spectrum.effective_sigma1 if magnitude > 0 else math.inf,
                status=average.status,
                value=value,
                phase=float(np.angle(value)) % (2.0 * math.pi) if complex_pair else None,
                t_stop=average.t_stop,
                reason=average.reason,
            )
        if complex_pair:
            return self.eigenfunction_complex(model, spectrum, x, opts)
        return self.eigenfunction_real(model, spectrum, observable, x, opts)

    def tau_difference(self, v: float, v_prime: float, spectrum: Spectrum) -> float:
        """tau(x) - tau(x') = ln(v / v') / sigma1 for magnitudes on two isostables"""
        if not (v > 0 and v_prime > 0):
            raise ZeroMagnitude(v=v, v_prime=v_prime)
        return math.log(v / v_prime) / spectrum.effective_sigma1

    # ===============================================
    # Integral forms
    # ===============================================

    def laplace_average_integral(self, model: VectorFieldModel, spectrum: Spectrum, f: Optional[Observable], x,
                                 T: Optional[float] = None, opts: Optional[LaplaceOptions] = None) -> LaplaceAverage:
        """
        (1/T) int_0^T f(phi_t(x)) exp(-lambda1 t) dt by 8-point Gauss-Legendre
        quadrature on every accepted step of the dense trajectory. The integrand
        is watched on a checkpoint grid; if it turns unstable the average up to the
        last stable checkpoint is returned as Truncated. An integrand that has not
        settled by the horizon gives the full-horizon average, also Truncated.
        """
        opts = opts or LaplaceOptions()
        f = f or self._configured_observable(spectrum, opts)
        factor = self._mode_factor(f, spectrum.v1)
        x = self._check_point(model, x)
        if np.array_equal(x, spectrum.center):
            return LaplaceAverage(average=0j, value=0j, status=Status.CONVERGED, t_stop=0.0)

        lam = spectrum.effective_lambda1
        horizon = float(T or opts.integration.horizon)
        if spectrum.leading_class is LeadingClass.COMPLEX_PAIR:
            # the conjugate mode of a real observable oscillates as exp(-2 i omega1 t); it is 1 at multiples of T1
            delta = spectrum_service.reduced_period(spectrum)
        else:
            delta = min(1.0 / abs(lam.real), horizon / CHECKPOINTS_PER_HORIZON)
        checkpoints = delta * np.arange(1, math.floor(horizon / delta + 1e-9) + 1)
        monitor = self._monitor(opts)
        watching = True
        cumulative = {0.0: 0j}

        def integrand(tt: np.ndarray, states: np.ndarray) -> np.ndarray:
            return np.asarray(f(states)) * np.exp(-lam * tt)

        total = 0j
        last_state = x
        try:
            for a, b, dense, is_checkpoint in self._segments(model, spectrum, x, horizon, checkpoints, opts):
                tt = 0.5 * (b - a) * GAUSS_NODES + 0.5 * (a + b)
                total += 0.5 * (b - a) * np.sum(GAUSS_WEIGHTS * integrand(tt, np.asarray(dense(tt)).T))
                last_state = np.asarray(dense(b))
                if not is_checkpoint:
                    continue
                cumulative[b] = total
                if not watching:
                    continue
                sample = complex(integrand(np.array([b]), last_state[None, :])[0])
                if not np.isfinite(sample):
                    raise GuardTriggered(time=b, point=last_state)
                verdict = monitor.update(b, sample)
                if verdict is None:
                    continue
                if verdict.status is Status.CONVERGED:
                    watching = False
                    continue
                t_stop = verdict.time
                if not t_stop:
                    raise GuardTriggered(time=b, point=last_state)
                average = cumulative[t_stop] / t_stop
                return LaplaceAverage(average=average, value=average / factor, status=Status.TRUNCATED,
                                      t_stop=t_stop, reason=verdict.reason)
        except (Escaped, Stalled) as exc:
            return LaplaceAverage.diverged(exc.context.get("time"))

        if np.linalg.norm(last_state - spectrum.center) > self._capture_radius(model, opts):
            return LaplaceAverage.diverged(horizon)
        average = total / horizon
        if watching:
            logger.debug(f"Integrand at {x} still changing at the horizon {horizon}")
            return LaplaceAverage(average=average, value=average / factor, status=Status.TRUNCATED,
                                  t_stop=horizon, reason="horizon")
        return LaplaceAverage(average=average, value=average / factor, status=Status.CONVERGED, t_stop=horizon)

    def generalized_laplace_average(self, model: VectorFieldModel, spectrum: Spectrum, f: Optional[Observable], x,
                                    j: int = 2, lower_averages: Optional[Sequence[complex]] = None,
                                    opts: Optional[LaplaceOptions] = None) -> LaplaceAverage:
        """
        Second eigenfunction s2 from the average of (f - A exp(lambda1 t)) exp(-lambda2 t),
        where A = grad f . v1 s1(x) is the first-mode term. For a complex leading
        pair s2 is the conjugate of s1.
        """
        if j != 2 or spectrum.dim < 2:
            raise UnsupportedEigenfunction(index=j)
        opts = opts or LaplaceOptions()
        status = Status.CONVERGED
        if not model.is_linear:
            if not opts.allow_experimental:
                raise ExperimentalResult(model=model.name)
            logger.warning(f"Second eigenfunction of nonlinear model {model.name} carries no accuracy claim")
            status = Status.EXPERIMENTAL

        f = f or self.default_observable(spectrum, j=2)
        factor = self._mode_factor(f, spectrum.right_vectors[:, 1])
        x = self._check_point(model, x)
        if np.array_equal(x, spectrum.center):
            return LaplaceAverage(average=0j, value=0j, status=status, t_stop=0.0)

        first_opts = opts.model_copy(update={"observable": None})
        if spectrum.leading_class is LeadingClass.COMPLEX_PAIR:
            first = self.eigenfunction_complex(model, spectrum, x, first_opts)
            if first.is_diverged:
                return LaplaceAverage.diverged(first.t_stop)
            value = np.conj(first.value)
            if first.status is not Status.CONVERGED:
                status = first.status
            return LaplaceAverage(average=factor * value, value=value, status=status, t_stop=first.t_stop)

        if lower_averages:
            first_mode, first_error = complex(lower_averages[0]), 0.0
        else:
            first = self.eigenfunction_real(model, spectrum, None, x, first_opts)
            if first.is_diverged:
                return LaplaceAverage.diverged(first.t_stop)
            mode_1 = f.mode_factor(spectrum.v1)
            first_mode, first_error = mode_1 * first.value, abs(mode_1) * first.uncertainty

        lam1, lam2 = spectrum.effective_lambda(1), spectrum.effective_lambda(2)
        horizon = opts.generalized_horizon or GENERALIZED_DECAY_TIMES / abs(lam2.real)

        total = 0j
        try:
            for a, b, dense, _ in self._segments(model, spectrum, x, horizon, (), opts):
                tt = 0.5 * (b - a) * GAUSS_NODES + 0.5 * (a + b)
                values = np.asarray(f(np.asarray(dense(tt)).T)) - first_mode * np.exp(lam1 * tt)
                total += 0.5 * (b - a) * np.sum(GAUSS_WEIGHTS * values * np.exp(-lam2 * tt))
        except (Escaped, Stalled) as exc:
            return LaplaceAverage.diverged(exc.context.get("time"))

        average = total / horizon
        gap = (lam1.real - lam2.real) * horizon
        propagated = first_error * (abs(math.expm1(gap) / gap) if gap else 1.0)
        if propagated > SUBTRACTION_TOL * abs(average):
            raise SubtractionLoss(propagated=propagated, average=average)
        residual = self._higher_mode_residual(spectrum, f, x, horizon)
        if residual > SUBTRACTION_TOL * abs(average):
            raise HigherModeResidual(residual=residual, average=average, horizon=horizon)
        return LaplaceAverage(average=average, value=average / factor, status=status, t_stop=horizon)

    # ===============================================
    # Helpers
    # ===============================================

    def integration_options(self, spectrum: Spectrum, opts: LaplaceOptions) -> IntegrationOptions:
        direction = Direction.FORWARD if spectrum.time_sign > 0 else Direction.BACKWARD
        return opts.integration.model_copy(update={"direction": direction})

    def _limit(self, model: VectorFieldModel, spectrum: Spectrum, x: np.ndarray, times: np.ndarray,
               term: Callable[[float, np.ndarray], complex], ratio: float, opts: LaplaceOptions):
        """Run the checkpoint sequence through elimination and the monitor; Diverged points come back as values."""
        accelerator = RichardsonAccelerator(ratio, opts.extrapolation_passes)
        monitor = self._monitor(opts)
        verdict: Optional[Verdict] = None
        last_state, last_time, last_raw = x, 0.0, 0j

        try:
            for t, state in flow_service.iterate_checkpoints(
                model, x, times, self.integration_options(spectrum, opts), center=spectrum.center
            ):
                last_state, last_time = state, t
                last_raw = term(t, state)
                estimate = accelerator.push(last_raw)
                if estimate is None:
                    continue
                verdict = monitor.update(t, estimate)
                if verdict is not None:
                    break
        except (Escaped, Stalled) as exc:
            return EigenfunctionValue.diverged(exc.context.get("time"), exc.error_code)

        if verdict is None:
            verdict = monitor.finish() or Verdict(Status.TRUNCATED, last_raw, last_time, math.inf, math.inf, "horizon")
        if not np.isfinite(verdict.value):
            raise GuardTriggered(time=verdict.time, point=last_state)
        if verdict.status is not Status.CONVERGED:
            distance = float(np.linalg.norm(last_state - spectrum.center))
            if distance > self._capture_radius(model, opts):
                return EigenfunctionValue.diverged(last_time, "outside capture radius")
        return verdict

    def _segments(self, model: VectorFieldModel, spectrum: Spectrum, x: np.ndarray, horizon: float,
                  checkpoints: Sequence[float], opts: LaplaceOptions) -> Iterator[Tuple[float, float, Callable, bool]]:
        """Accepted steps split at the checkpoint times: (a, b, dense, b is a checkpoint)."""
        checkpoints = np.asarray(checkpoints, dtype=float)
        k = 0
        for t_old, t_new, _, dense in flow_service.iterate_steps(
            model, x, horizon, self.integration_options(spectrum, opts), center=spectrum.center
        ):
            a = t_old
            while k < checkpoints.size and checkpoints[k] <= t_new:
                if checkpoints[k] > a:
                    yield a, float(checkpoints[k]), dense, True
                    a = float(checkpoints[k])
                k += 1
            if t_new > a:
                yield a, t_new, dense, False

    def _monitor(self, opts: LaplaceOptions) -> ConvergenceMonitor:
        return ConvergenceMonitor(
            tol=opts.convergence_tol,
            window=opts.window,
            activation=opts.guard_activation,
            patience=opts.guard_patience,
            floor=opts.magnitude_floor,
        )

    def _configured_observable(self, spectrum: Spectrum, opts: LaplaceOptions) -> Observable:
        if opts.observable is None:
            return self.default_observable(spectrum)
        if len(opts.observable) != spectrum.dim:
            raise DimensionMismatch("observable gradient has the wrong length",
                                    expected=spectrum.dim, received=len(opts.observable))
        return Observable.linear(np.asarray(opts.observable, dtype=float), spectrum.center)

    def _mode_factor(self, f: Observable, vector: np.ndarray) -> complex:
        factor = f.mode_factor(vector)
        if abs(factor) < PROJECTION_TOL * np.linalg.norm(f.gradient):
            raise ZeroProjection(projection=abs(factor))
        return factor

    def _pair_scale(self, f1: Observable, spectrum: Spectrum) -> float:
        scale = f1.mode_factor(spectrum.a).real
        if abs(scale) < PROJECTION_TOL * np.linalg.norm(f1.gradient):
            raise ZeroProjection(projection=scale)
        return scale

    def _higher_mode_residual(self, spectrum: Spectrum, f: Observable, x: np.ndarray, horizon: float) -> float:
        """
        Bound on what modes j >= 3 leave in the generalized average: their term
        c_j exp(lambda_j t) averages against exp(-lambda2 t) to
        c_j (exp((lambda_j - lambda2) T) - 1) / ((lambda_j - lambda2) T), with c_j
        taken from the linear projection of x.
        """
        lam2 = spectrum.effective_lambda(2)
        residual = 0.0
        for j in range(3, spectrum.dim + 1):
            mode = f.mode_factor(spectrum.right_vectors[:, j - 1])
            if abs(mode) < PROJECTION_TOL * np.linalg.norm(f.gradient):
                continue
            gap = (spectrum.effective_lambda(j) - lam2) * horizon
            residual += abs(mode * spectrum.project(x, j)) * abs(np.expm1(complex(gap)) / gap)
        return residual

    def _capture_radius(self, model: VectorFieldModel, opts: LaplaceOptions) -> float:
        if opts.capture_radius is not None:
            return opts.capture_radius
        return settings.CAPTURE_FRACTION * model.domain_diagonal

    def _check_point(self, model: VectorFieldModel, x) -> np.ndarray:
        point = as_point(x)
        if point.size != model.dim:
            raise DimensionMismatch(expected=model.dim, received=int(point.size))
        return point


laplace_service = LaplaceService()
