import logging
from typing import Callable, Iterator, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import DOP853, RK45

from isostables.core.config import settings
from isostables.core.errors import DimensionMismatch, Escaped, Stalled
from isostables.dynamics.models import VectorFieldModel, as_point
from isostables.flow.models import Termination, Trajectory
from isostables.flow.schemas import Direction, IntegrationOptions

logger = logging.getLogger(__name__)

SOLVERS = {"DOP853": DOP853, "RK45": RK45}

# (t_old, t_new, state at t_new, dense interpolant on [t_old, t_new])
Step = Tuple[float, float, np.ndarray, Callable[[float], np.ndarray]]


class _SignedField:
    """Picklable (t, y) -> sign * F(y) adapter for scipy solvers."""

    def __init__(self, model: VectorFieldModel, sign: float):
        self.model = model
        self.sign = sign

    def __call__(self, t: float, y: np.ndarray) -> np.ndarray:
        return self.sign * self.model.rhs(y)


class FlowService:
    """Service class for the flow map phi(t, x)"""

    def escape_radius(self, model: VectorFieldModel, opts: IntegrationOptions) -> float:
        if opts.escape_radius is not None:
            return opts.escape_radius
        return settings.ESCAPE_FACTOR * model.domain_diagonal

    def iterate_steps(self, model: VectorFieldModel, x0, t_end: float, opts: IntegrationOptions,
                      center: Optional[np.ndarray] = None) -> Iterator[Step]:
        """
        Advance the adaptive solver one accepted step at a time up to `t_end`.
        Raises Escaped once the state leaves the escape ball around `center`
        (the origin when no center is given) and Stalled if the step size underflows.
        """
        x0 = as_point(x0)
        if x0.size != model.dim:
            raise DimensionMismatch(expected=model.dim, received=int(x0.size))
        if t_end <= 0:
            return

        sign = -1.0 if opts.direction is Direction.BACKWARD else 1.0
        solver = SOLVERS[opts.method](
            _SignedField(model, sign), 0.0, x0, t_end,
            rtol=opts.rel_tol, atol=opts.abs_tol, max_step=opts.max_step,
        )
        origin = np.zeros(model.dim) if center is None else np.asarray(center, dtype=float)
        radius = self.escape_radius(model, opts)

        while solver.status == "running":
            t_old = solver.t
            message = solver.step()
            if solver.status == "failed":
                raise Stalled(message, time=t_old, point=np.array(solver.y))
            state = np.array(solver.y)
            if not np.all(np.isfinite(state)) or np.linalg.norm(state - origin) > radius:
                raise Escaped(point=state, time=solver.t, radius=radius)
            yield t_old, solver.t, state, solver.dense_output()

    def flow_to(self, model: VectorFieldModel, x0, t: float, opts: IntegrationOptions,
                center: Optional[np.ndarray] = None) -> np.ndarray:
        """Endpoint phi(t, x0) of the adaptive embedded Runge-Kutta integration"""
        if t < 0:
            raise ValueError("flow time must be non-negative; use direction=Backward to reverse time")
        state = as_point(x0).copy()
        for _, _, state, _ in self.iterate_steps(model, x0, t, opts, center):
            pass
        return state

    def iterate_checkpoints(self, model: VectorFieldModel, x0, times: Sequence[float], opts: IntegrationOptions,
                            center: Optional[np.ndarray] = None) -> Iterator[Tuple[float, np.ndarray]]:
        """
        Lazily yield (t, phi(t, x0)) for increasing non-negative `times`; integration
        only proceeds as far as the caller consumes.
        """
        times = np.asarray(times, dtype=float)
        if times.size == 0:
            return
        if np.any(times < 0) or np.any(np.diff(times) <= 0):
            raise ValueError("checkpoint times must be non-negative and strictly increasing")

        x0 = as_point(x0)
        k = 0
        while k < times.size and times[k] == 0.0:
            yield 0.0, x0.copy()
            k += 1
        if k == times.size:
            return

        for _, t_new, state, dense in self.iterate_steps(model, x0, float(times[-1]), opts, center):
            while k < times.size and times[k] <= t_new:
                yield float(times[k]), state.copy() if times[k] == t_new else np.asarray(dense(times[k]))
                k += 1
            if k == times.size:
                return

    def sample_trajectory(self, model: VectorFieldModel, x0, times: Sequence[float], opts: IntegrationOptions,
                          center: Optional[np.ndarray] = None, raise_on_failure: bool = True) -> Trajectory:
        """
        States at the requested times from the dense output of the adaptive solver.
        With raise_on_failure=False an escape or stall returns the samples reached
        so far and records how the integration ended.
        """
        sampled_times, states = [], []
        terminated, escape_point, stop_time = Termination.COMPLETED, None, None
        try:
            for t, state in self.iterate_checkpoints(model, x0, times, opts, center):
                sampled_times.append(t)
                states.append(state)
        except (Escaped, Stalled) as exc:
            if raise_on_failure:
                raise
            terminated = Termination.ESCAPED if isinstance(exc, Escaped) else Termination.STALLED
            escape_point = exc.context.get("point")
            stop_time = exc.context.get("time")
            logger.warning(f"Trajectory from {as_point(x0)} ended early: {terminated.value} at t={stop_time}")

        dim = model.dim
        return Trajectory(
            times=np.asarray(sampled_times, dtype=float),
            states=np.asarray(states, dtype=float).reshape(-1, dim),
            terminated=terminated,
            escape_point=escape_point,
            stop_time=stop_time,
        )


flow_service = FlowService()
