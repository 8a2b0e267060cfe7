import logging
from typing import Optional

import numpy as np

from isostables.core.config import settings
from isostables.core.errors import (
    DimensionMismatch,
    NoConvergence,
    NonFiniteField,
    SingularJacobian,
    UnknownModel,
)
from isostables.dynamics.models import (
    MODEL_REGISTRY,
    FixedPoint,
    LinearSystem,
    VectorFieldModel,
    as_point,
)
from isostables.dynamics.schemas import ModelConfig

logger = logging.getLogger(__name__)

FD_STEP = 1e-5
NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 100
MIN_DAMPING = 2.0 ** -20


class DynamicsService:
    """Service class for vector-field evaluation and fixed-point location"""

    def build_model(self, config: ModelConfig) -> VectorFieldModel:
        """Instantiate a registered model from its config"""
        model_cls = MODEL_REGISTRY.get(config.model)
        if model_cls is None:
            raise UnknownModel(model=config.model, known=sorted(MODEL_REGISTRY))

        extras = {}
        if config.domain is not None:
            extras["domain"] = tuple(tuple(axis) for axis in config.domain)
        if config.guess is not None:
            extras["guess"] = tuple(config.guess)

        try:
            if model_cls is LinearSystem:
                model = LinearSystem(matrix=np.asarray(config.matrix, dtype=float), **extras)
            else:
                model = model_cls(**config.params, **extras)
        except TypeError as exc:
            raise UnknownModel(f"Unknown parameter for model '{config.model}'", detail=str(exc)) from exc
        except ValueError as exc:
            raise DimensionMismatch(str(exc)) from exc

        if model.domain is not None and len(model.domain) != model.dim:
            raise DimensionMismatch(f"domain has {len(model.domain)} axes, model has {model.dim}")
        if model.guess is not None and len(model.guess) != model.dim:
            raise DimensionMismatch(f"guess has {len(model.guess)} components, model has {model.dim}")
        return model

    def evaluate_rhs(self, model: VectorFieldModel, x) -> np.ndarray:
        """Evaluate F(x); raises NonFiniteField if any component is not finite"""
        point = self._check_point(model, x)
        velocity = np.asarray(model.rhs(point), dtype=float)
        if not np.all(np.isfinite(velocity)):
            raise NonFiniteField(point=point, value=velocity)
        return velocity

    def jacobian_at(self, model: VectorFieldModel, x) -> np.ndarray:
        """
        Analytic Jacobian when the model has one, otherwise fourth-order central
        differences with step 1e-5 * max(1, |x_i|) per coordinate.
        """
        point = self._check_point(model, x)
        jac = model.jacobian(point) if model.has_jacobian else None
        if jac is None:
            jac = self.finite_difference_jacobian(model, point)
        jac = np.asarray(jac, dtype=float)
        if not np.all(np.isfinite(jac)):
            raise NonFiniteField("Jacobian has non-finite entries", point=point, value=jac)
        return jac

    def finite_difference_jacobian(self, model: VectorFieldModel, x) -> np.ndarray:
        point = as_point(x)
        n = point.size
        jac = np.empty((n, n))
        for i in range(n):
            h = FD_STEP * max(1.0, abs(point[i]))
            e = np.zeros(n)
            e[i] = h
            jac[:, i] = (
                -self.evaluate_rhs(model, point + 2 * e)
                + 8 * self.evaluate_rhs(model, point + e)
                - 8 * self.evaluate_rhs(model, point - e)
                + self.evaluate_rhs(model, point - 2 * e)
            ) / (12 * h)
        return jac

    def find_fixed_point(self, model: VectorFieldModel, guess=None, max_iter: int = NEWTON_MAX_ITER) -> FixedPoint:
        """
        Damped Newton iteration on F(x) = 0. The step is halved while the residual
        does not decrease, down to a factor of 2^-20.
        """
        x = self._check_point(model, model.default_guess if guess is None else guess)
        residual_vec = self.evaluate_rhs(model, x)

        for iteration in range(max_iter + 1):
            residual = float(np.linalg.norm(residual_vec))
            if residual <= NEWTON_TOL * max(1.0, float(np.linalg.norm(x))):
                logger.debug(f"Fixed point of {model.name} found after {iteration} iterations")
                return FixedPoint(location=x, residual=residual, iterations=iteration)
            if iteration == max_iter:
                break

            jac = self.jacobian_at(model, x)
            try:
                step = np.linalg.solve(jac, -residual_vec)
            except np.linalg.LinAlgError as exc:
                raise SingularJacobian(point=x, iteration=iteration) from exc
            if not np.all(np.isfinite(step)) or np.linalg.cond(jac) > 1.0 / np.finfo(float).eps:
                raise SingularJacobian(point=x, iteration=iteration)

            alpha = 1.0
            while True:
                candidate = x + alpha * step
                try:
                    candidate_vec = self.evaluate_rhs(model, candidate)
                    candidate_norm = float(np.linalg.norm(candidate_vec))
                except NonFiniteField:
                    candidate_vec, candidate_norm = None, np.inf
                if candidate_norm < residual or alpha <= MIN_DAMPING:
                    break
                alpha /= 2.0

            if candidate_vec is None:
                raise NoConvergence("Newton step left the region where the field is finite", point=x)
            x, residual_vec = candidate, candidate_vec

        raise NoConvergence(point=x, residual=float(np.linalg.norm(residual_vec)), iterations=max_iter)

    def check_jacobian(self, model: VectorFieldModel, n_points: int = 100, seed: Optional[int] = None) -> float:
        """Largest relative gap between analytic and finite-difference Jacobians at random domain points"""
        if not model.has_jacobian:
            return 0.0
        rng = np.random.default_rng(settings.RANDOM_SEED if seed is None else seed)
        bounds = model.bounds
        worst = 0.0
        for point in rng.uniform(bounds[:, 0], bounds[:, 1], size=(n_points, model.dim)):
            analytic = self.jacobian_at(model, point)
            numeric = self.finite_difference_jacobian(model, point)
            gap = np.linalg.norm(analytic - numeric) / max(1.0, float(np.linalg.norm(analytic)))
            worst = max(worst, float(gap))
        return worst

    def _check_point(self, model: VectorFieldModel, x) -> np.ndarray:
        point = as_point(x)
        if point.size != model.dim:
            raise DimensionMismatch(expected=model.dim, received=int(point.size))
        return point


dynamics_service = DynamicsService()
