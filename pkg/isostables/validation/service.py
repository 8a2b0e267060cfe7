import logging
import math
from typing import Callable, Dict, List, Optional, Tuple, get_args

import numpy as np

from isostables.core.errors import ConfigError, Escaped, IsostableError, Stalled
from isostables.core.output import timestamp
from isostables.dynamics.models import LinearSystem, VectorFieldModel
from isostables.dynamics.service import NEWTON_TOL, dynamics_service
from isostables.field.service import field_service
from isostables.flow.service import flow_service
from isostables.laplace.models import EigenfunctionValue, Observable, Status
from isostables.laplace.schemas import LaplaceOptions
from isostables.laplace.service import laplace_service
from isostables.spectrum.models import LeadingClass, Spectrum
from isostables.spectrum.service import spectrum_service
from isostables.validation.schemas import CheckName, CheckResult, ValidateConfig, ValidationReport

logger = logging.getLogger(__name__)

SAMPLE_FRACTION = 0.1
INTEGRAL_RADIUS_FACTOR = 10.0
ORACLE_POINTS = 20
ORACLE_PERIODS = 8
QUADRATIC_CURVATURES = (0.3, -0.2)


def random_stable_system(rng: np.random.Generator, n: int, kind: str = "real") -> np.ndarray:
    """
    Random stable matrix with distinct, well separated eigenvalues and an
    eigenbasis of condition number at most 100. `kind` is "real" or "complex"
    (a leading pair with omega >= 4 |sigma|).
    """
    if kind not in ("real", "complex"):
        raise ValueError(f"unknown system kind '{kind}'")
    if kind == "complex" and n < 2:
        raise ValueError("a complex pair needs n >= 2")

    while True:
        basis = np.eye(n) + 0.5 * rng.normal(size=(n, n))
        if np.linalg.cond(basis) <= 100.0:
            break

    block = np.zeros((n, n))
    sigma = -rng.uniform(0.2, 0.8)
    k = 0
    if kind == "complex":
        omega = abs(sigma) * rng.uniform(4.0, 6.0)
        block[:2, :2] = [[sigma, omega], [-omega, sigma]]
        k = 2
    else:
        block[0, 0] = sigma
        k = 1
    for i in range(k, n):
        sigma = sigma - rng.uniform(0.3, 1.0)
        block[i, i] = sigma
    return basis @ block @ np.linalg.inv(basis)


class ValidationService:
    """Service class for the invariant suite of the validate command"""

    CHECKS = get_args(CheckName)

    def run(self, model: VectorFieldModel, spectrum: Spectrum, config: ValidateConfig,
            opts: Optional[LaplaceOptions] = None, with_timestamp: bool = True) -> ValidationReport:
        opts = opts or LaplaceOptions()
        selected = config.checks or list(self.CHECKS)
        unknown = sorted(set(selected) - set(self.CHECKS))
        if unknown:
            raise ConfigError("Unknown validation checks", section="validate", unknown=unknown,
                              resolution=f"Use any of: {', '.join(self.CHECKS)}")

        checks: List[CheckResult] = []
        for name in self.CHECKS:
            if name not in selected:
                continue
            runner: Callable[..., List[CheckResult]] = getattr(self, f"_check_{name}")
            try:
                results = runner(model, spectrum, config, opts)
            except IsostableError as exc:
                results = [CheckResult(name=name, passed=False, detail=exc.detail)]
            for result in results:
                level = logging.INFO if result.passed else logging.WARNING
                logger.log(level, f"{result.name}: {'passed' if result.passed else 'FAILED'} "
                                  f"(measured {result.measured}, tolerance {result.tolerance})")
            checks.extend(results)

        return ValidationReport(
            model=model.name,
            params=model.params,
            fingerprint=spectrum.fingerprint(),
            passed=all(check.passed for check in checks),
            checks=checks,
            created_at=timestamp() if with_timestamp else None,
        )

    # ===============================================
    # Sampling helpers
    # ===============================================

    def sample_points(self, model: VectorFieldModel, spectrum: Spectrum, count: int, radius: float,
                      rng: np.random.Generator) -> np.ndarray:
        """Uniform points in the ball of `radius` around x*."""
        directions = rng.normal(size=(count, spectrum.dim))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        radii = radius * rng.uniform(size=count) ** (1.0 / spectrum.dim)
        return spectrum.center + directions * radii[:, None]

    def _sample_radius(self, model: VectorFieldModel, config: ValidateConfig) -> float:
        return config.sample_radius or SAMPLE_FRACTION * model.domain_diagonal

    def _converged(self, model: VectorFieldModel, spectrum: Spectrum, x,
                   opts: LaplaceOptions) -> Optional[EigenfunctionValue]:
        value = laplace_service.eigenfunction(model, spectrum, x, opts)
        return value if value.status is Status.CONVERGED else None

    def _flow(self, model: VectorFieldModel, spectrum: Spectrum, x, t: float,
              opts: LaplaceOptions) -> Optional[np.ndarray]:
        try:
            return flow_service.flow_to(model, x, t, laplace_service.integration_options(spectrum, opts),
                                        center=spectrum.center)
        except (Escaped, Stalled):
            return None

    def _no_samples(self, name: str, tolerance: float) -> CheckResult:
        return CheckResult(name=name, passed=False, tolerance=tolerance,
                           detail={"message": "No sample point converged"})

    # ===============================================
    # Dynamics and spectrum
    # ===============================================

    def _check_jacobian_consistency(self, model, spectrum, config, opts) -> List[CheckResult]:
        if not model.has_jacobian:
            return []
        gap = dynamics_service.check_jacobian(model, seed=config.seed)
        return [CheckResult(name="jacobian_consistency", passed=gap <= config.jacobian_tol,
                            measured=gap, tolerance=config.jacobian_tol)]

    def _check_fixed_point_residual(self, model, spectrum, config, opts) -> List[CheckResult]:
        fp = spectrum.fixed_point
        bound = NEWTON_TOL * max(1.0, float(np.linalg.norm(fp.location)))
        residual = float(np.linalg.norm(dynamics_service.evaluate_rhs(model, fp.location)))
        return [CheckResult(name="fixed_point_residual", passed=residual <= bound, measured=residual,
                            tolerance=bound, detail={"location": fp.location, "iterations": fp.iterations})]

    def _check_spectrum_biorthogonality(self, model, spectrum, config, opts) -> List[CheckResult]:
        gram = spectrum.left_vectors.conj().T @ spectrum.right_vectors
        gap = float(np.max(np.abs(gram - np.eye(spectrum.dim))))
        return [CheckResult(name="spectrum_biorthogonality", passed=gap <= config.biorthogonality_tol,
                            measured=gap, tolerance=config.biorthogonality_tol)]

    def _check_spectrum_reconstruction(self, model, spectrum, config, opts) -> List[CheckResult]:
        rng = np.random.default_rng(config.seed)
        worst = 0.0
        for x in rng.normal(size=(config.samples, spectrum.dim)):
            rebuilt = spectrum.right_vectors @ (spectrum.left_vectors.conj().T @ x)
            worst = max(worst, float(np.linalg.norm(rebuilt - x) / np.linalg.norm(x)))
        return [CheckResult(name="spectrum_reconstruction", passed=worst <= config.biorthogonality_tol,
                            measured=worst, tolerance=config.biorthogonality_tol)]

    # ===============================================
    # Eigenfunction invariants
    # ===============================================

    def _check_tau_difference_anchor(self, model, spectrum, config, opts) -> List[CheckResult]:
        results = []
        for anchor in config.anchors:
            tau = laplace_service.tau_difference(anchor.v, anchor.v_prime, spectrum)
            error = abs(tau - anchor.expected) / abs(anchor.expected) if anchor.expected else abs(tau)
            results.append(CheckResult(
                name="tau_difference_anchor", passed=error <= anchor.rel_tol, measured=error,
                tolerance=anchor.rel_tol, detail={"v": anchor.v, "v_prime": anchor.v_prime,
                                                  "tau_difference": tau, "expected": anchor.expected},
            ))
        return results

    def _semigroup_samples(self, model, spectrum, config, opts):
        """(t, value at x, value at phi_t(x)) for every Converged pair."""
        rng = np.random.default_rng(config.seed)
        pairs = []
        for x in self.sample_points(model, spectrum, config.samples, self._sample_radius(model, config), rng):
            start = self._converged(model, spectrum, x, opts)
            if start is None or start.magnitude == 0:
                continue
            for t in config.semigroup_times:
                moved = self._flow(model, spectrum, x, t, opts)
                if moved is None:
                    continue
                end = self._converged(model, spectrum, moved, opts)
                if end is not None:
                    pairs.append((t, start, end))
        return pairs

    def _check_eigenfunction_semigroup(self, model, spectrum, config, opts) -> List[CheckResult]:
        pairs = self._semigroup_samples(model, spectrum, config, opts)
        if not pairs:
            return [self._no_samples("eigenfunction_semigroup", config.semigroup_tol)]
        sigma = spectrum.effective_sigma1
        worst = max(abs(end.magnitude / (start.magnitude * math.exp(sigma * t)) - 1.0) for t, start, end in pairs)
        return [CheckResult(name="eigenfunction_semigroup", passed=worst <= config.semigroup_tol,
                            measured=worst, tolerance=config.semigroup_tol, detail={"pairs": len(pairs)})]

    def _check_phase_advance(self, model, spectrum, config, opts) -> List[CheckResult]:
        if spectrum.leading_class is not LeadingClass.COMPLEX_PAIR:
            return []
        pairs = self._semigroup_samples(model, spectrum, config, opts)
        if not pairs:
            return [self._no_samples("phase_advance", config.phase_tol)]
        omega = spectrum.effective_omega1
        worst = max(
            abs(float(np.angle(np.exp(1j * (end.phase - start.phase - omega * t))))) for t, start, end in pairs
        )
        return [CheckResult(name="phase_advance", passed=worst <= config.phase_tol, measured=worst,
                            tolerance=config.phase_tol, detail={"pairs": len(pairs)})]

    def _alternative_observable(self, spectrum: Spectrum, opts: LaplaceOptions) -> Dict:
        """A quadratic observable (or pair) with the same leading mode, as eigenfunction keyword arguments."""
        if spectrum.leading_class is LeadingClass.COMPLEX_PAIR:
            mode = "spectral" if opts.pair_mode == "span" else "span"
            f1, f2 = laplace_service.build_observable_pair(spectrum, mode)
            return {"observables": (
                Observable.quadratic(f1.gradient, spectrum.center, QUADRATIC_CURVATURES[0]),
                Observable.quadratic(f2.gradient, spectrum.center, QUADRATIC_CURVATURES[1]),
            )}
        # coordinate observable along the dominant component of v1
        gradient = np.zeros(spectrum.dim)
        gradient[int(np.argmax(np.abs(spectrum.v1)))] = 1.0
        return {"observable": Observable.quadratic(gradient, spectrum.center, QUADRATIC_CURVATURES[0])}

    def _check_observable_independence(self, model, spectrum, config, opts) -> List[CheckResult]:
        rng = np.random.default_rng(config.seed)
        alternative = self._alternative_observable(spectrum, opts)
        ratios = []
        for x in self.sample_points(model, spectrum, config.samples, self._sample_radius(model, config), rng):
            first = self._converged(model, spectrum, x, opts)
            if first is None or first.magnitude == 0:
                continue
            if "observables" in alternative:
                second = laplace_service.eigenfunction_complex(model, spectrum, x, opts, alternative["observables"])
            else:
                second = laplace_service.eigenfunction_real(model, spectrum, alternative["observable"], x, opts)
            if second.status is Status.CONVERGED:
                ratios.append(second.magnitude / first.magnitude)
        if not ratios:
            return [self._no_samples("observable_independence", config.independence_tol)]
        spread = float((max(ratios) - min(ratios)) / np.mean(ratios))
        return [CheckResult(name="observable_independence", passed=spread <= config.independence_tol,
                            measured=spread, tolerance=config.independence_tol,
                            detail={"points": len(ratios), "mean_ratio": float(np.mean(ratios))})]

    def _check_local_linearization(self, model, spectrum, config, opts) -> List[CheckResult]:
        rng = np.random.default_rng(config.seed)
        directions = rng.normal(size=(config.samples, spectrum.dim))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        errors = []
        for x in spectrum.center + config.near_radius * directions:
            value = self._converged(model, spectrum, x, opts)
            linear = abs(spectrum.project(x))
            if value is not None and linear > 0:
                errors.append(abs(value.magnitude / linear - 1.0))
        if not errors:
            return [self._no_samples("local_linearization", config.local_tol)]
        worst = max(errors)
        return [CheckResult(name="local_linearization", passed=worst <= config.local_tol, measured=worst,
                            tolerance=config.local_tol, detail={"radius": config.near_radius})]

    def _check_lyapunov_decay(self, model, spectrum, config, opts) -> List[CheckResult]:
        rng = np.random.default_rng(config.seed)
        slopes = []
        for x in self.sample_points(model, spectrum, config.samples, self._sample_radius(model, config), rng):
            try:
                slope = field_service.lyapunov_slope(model, spectrum, x, config.lyapunov_times, opts)
            except (Escaped, Stalled):
                continue
            if np.isfinite(slope):
                slopes.append(slope)
        if not slopes:
            return [self._no_samples("lyapunov_decay", config.lyapunov_tol)]
        worst = max(abs(slope - spectrum.effective_sigma1) for slope in slopes)
        return [CheckResult(name="lyapunov_decay", passed=worst <= config.lyapunov_tol, measured=worst,
                            tolerance=config.lyapunov_tol,
                            detail={"trajectories": len(slopes), "sigma1": spectrum.effective_sigma1})]

    def _check_metric_contraction(self, model, spectrum, config, opts) -> List[CheckResult]:
        rng = np.random.default_rng(config.seed)
        radius = self._sample_radius(model, config)
        first = self.sample_points(model, spectrum, config.samples, radius, rng)
        second = self.sample_points(model, spectrum, config.samples, radius, rng)
        sigma = spectrum.effective_sigma1
        errors = []
        for x, x_prime in zip(first, second):
            start = field_service.contraction_distance(model, spectrum, x, x_prime, opts)
            if not np.isfinite(start) or start == 0:
                continue
            for t in config.semigroup_times:
                moved = self._flow(model, spectrum, x, t, opts)
                moved_prime = self._flow(model, spectrum, x_prime, t, opts)
                if moved is None or moved_prime is None:
                    continue
                end = field_service.contraction_distance(model, spectrum, moved, moved_prime, opts)
                if np.isfinite(end):
                    errors.append(abs(end / (start * math.exp(sigma * t)) - 1.0))
        if not errors:
            return [self._no_samples("metric_contraction", config.semigroup_tol)]
        worst = max(errors)
        return [CheckResult(name="metric_contraction", passed=worst <= config.semigroup_tol, measured=worst,
                            tolerance=config.semigroup_tol, detail={"pairs": len(errors)})]

    def _check_integral_limit_agreement(self, model, spectrum, config, opts) -> List[CheckResult]:
        rng = np.random.default_rng(config.seed)
        integral_opts = opts.model_copy(update={"method": "integral"})
        limit_opts = opts.model_copy(update={"method": "limit"})
        radius = INTEGRAL_RADIUS_FACTOR * config.near_radius
        errors = []
        for x in self.sample_points(model, spectrum, config.samples, radius, rng):
            limit = self._converged(model, spectrum, x, limit_opts)
            integral = self._converged(model, spectrum, x, integral_opts)
            if limit is not None and integral is not None and limit.magnitude > 0:
                errors.append(abs(integral.magnitude / limit.magnitude - 1.0))
        if not errors:
            return [self._no_samples("integral_limit_agreement", config.integral_tol)]
        worst = max(errors)
        return [CheckResult(name="integral_limit_agreement", passed=worst <= config.integral_tol,
                            measured=worst, tolerance=config.integral_tol, detail={"points": len(errors)})]

    # ===============================================
    # Linear oracles
    # ===============================================

    def _oracle_systems(self, model, spectrum, config) -> List[Tuple[str, VectorFieldModel, Spectrum]]:
        systems = []
        if model.is_linear:
            systems.append(("configured", model, spectrum))
        rng = np.random.default_rng(config.seed)
        for index in range(config.random_systems):
            n = int(rng.choice(config.random_dims))
            kind = "complex" if index % 2 else "real"
            matrix = random_stable_system(rng, n, kind)
            linear = LinearSystem(matrix=matrix)
            fp = dynamics_service.find_fixed_point(linear, np.zeros(n))
            systems.append((f"random_{index}", linear, spectrum_service.compute_spectrum(linear, fp)))
        return systems

    def _oracle_options(self, spectrum: Spectrum, opts: LaplaceOptions) -> LaplaceOptions:
        update: Dict = {"pair_mode": "spectral", "method": "limit", "observable": None}
        if spectrum.leading_class is LeadingClass.COMPLEX_PAIR:
            horizon = max(opts.integration.horizon, ORACLE_PERIODS * spectrum_service.reduced_period(spectrum))
            update["integration"] = opts.integration.model_copy(update={"horizon": horizon})
        return opts.model_copy(update=update)

    def _oracle_points(self, spectrum: Spectrum, rng: np.random.Generator) -> np.ndarray:
        return spectrum.center + rng.normal(size=(ORACLE_POINTS, spectrum.dim))

    def _check_linear_oracle(self, model, spectrum, config, opts) -> List[CheckResult]:
        results = []
        rng = np.random.default_rng(config.seed + 1)
        for label, linear, linear_spectrum in self._oracle_systems(model, spectrum, config):
            oracle_opts = self._oracle_options(linear_spectrum, opts)
            worst = 0.0
            for x in self._oracle_points(linear_spectrum, rng):
                value = laplace_service.eigenfunction(linear, linear_spectrum, x, oracle_opts)
                expected = linear_spectrum.project(x)
                worst = max(worst, abs(value.value - expected) / abs(expected))
            results.append(CheckResult(
                name="linear_oracle", passed=worst <= config.oracle_tol, measured=worst,
                tolerance=config.oracle_tol,
                detail={"system": label, "eigenvalues": linear_spectrum.eigenvalues},
            ))
        return results

    def _check_generalized_oracle(self, model, spectrum, config, opts) -> List[CheckResult]:
        results = []
        rng = np.random.default_rng(config.seed + 2)
        for label, linear, linear_spectrum in self._oracle_systems(model, spectrum, config):
            if linear_spectrum.dim < 2:
                continue
            oracle_opts = self._oracle_options(linear_spectrum, opts)
            worst = 0.0
            for x in self._oracle_points(linear_spectrum, rng):
                average = laplace_service.generalized_laplace_average(
                    linear, linear_spectrum, None, x, 2, None, oracle_opts
                )
                expected = linear_spectrum.project(x, 2)
                worst = max(worst, abs(average.value - expected) / abs(expected))
            results.append(CheckResult(
                name="generalized_oracle", passed=worst <= config.generalized_tol, measured=worst,
                tolerance=config.generalized_tol,
                detail={"system": label, "eigenvalues": linear_spectrum.eigenvalues},
            ))
        return results


validation_service = ValidationService()
