from itertools import islice

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError
from scipy.linalg import expm

from isostables.core.errors import DimensionMismatch, Escaped
from isostables.dynamics.models import LinearSystem, TimeReversed
from isostables.flow.models import Termination
from isostables.flow.schemas import Direction, IntegrationOptions, TrajectoryConfig
from isostables.flow.service import flow_service
from isostables.validation.service import random_stable_system

OPTS = IntegrationOptions()


def test_linear_flow_matches_matrix_exponential(spiral):
    x0 = np.array([1.0, 0.5])
    for t in (0.5, 3.0, 12.0):
        expected = expm(spiral.matrix * t) @ x0
        np.testing.assert_allclose(flow_service.flow_to(spiral, x0, t, OPTS), expected, atol=1e-9)


@given(seed=st.integers(min_value=0, max_value=2 ** 32 - 1), n=st.sampled_from([2, 3]),
       kind=st.sampled_from(["real", "complex"]))
def test_random_stable_flows_match_matrix_exponential(seed, n, kind):
    rng = np.random.default_rng(seed)
    model = LinearSystem(matrix=random_stable_system(rng, n, kind))
    x0 = rng.normal(size=n)
    opts = IntegrationOptions(escape_radius=1e6)
    for t in (0.5, 3.0):
        expected = expm(model.matrix * t) @ x0
        np.testing.assert_allclose(flow_service.flow_to(model, x0, t, opts), expected,
                                   rtol=1e-9, atol=1e-9 * np.linalg.norm(x0))


def test_scalar_decay_sampled_on_requested_times():
    model = LinearSystem(matrix=[[-1.0]])
    trajectory = flow_service.sample_trajectory(model, [1.0], [0.0, 1.0, 2.0], OPTS)

    assert len(trajectory) == 3
    assert trajectory.terminated is Termination.COMPLETED
    np.testing.assert_allclose(trajectory.states[:, 0], np.exp(-np.array([0.0, 1.0, 2.0])), atol=1e-9)


def test_flow_at_time_zero_is_identity(fn_complex):
    np.testing.assert_array_equal(flow_service.flow_to(fn_complex, [0.4, -0.2], 0.0, OPTS), [0.4, -0.2])


def test_fixed_point_is_invariant(fn_real, fn_real_spectrum):
    center = fn_real_spectrum.center
    np.testing.assert_allclose(flow_service.flow_to(fn_real, center, 10.0, OPTS), center, atol=1e-9)


def test_semigroup_property(fn_complex):
    x0 = [0.6, 0.1]
    direct = flow_service.flow_to(fn_complex, x0, 5.0, OPTS)
    composed = flow_service.flow_to(fn_complex, flow_service.flow_to(fn_complex, x0, 3.0, OPTS), 2.0, OPTS)
    np.testing.assert_allclose(composed, direct, atol=1e-8)


def test_backward_direction_equals_time_reversed_model(source):
    backward = OPTS.model_copy(update={"direction": Direction.BACKWARD})
    x0 = [1.0, 1.0]

    state = flow_service.flow_to(source, x0, 2.0, backward)
    np.testing.assert_allclose(state, [np.exp(-2.0), np.exp(-4.0)], atol=1e-10)
    np.testing.assert_allclose(flow_service.flow_to(TimeReversed(base=source), x0, 2.0, OPTS), state, atol=1e-12)


def test_escape_radius(source):
    opts = OPTS.model_copy(update={"escape_radius": 10.0})
    with pytest.raises(Escaped) as exc_info:
        flow_service.flow_to(source, [1.0, 1.0], 10.0, opts)
    assert np.linalg.norm(exc_info.value.context["point"]) > 10.0
    assert exc_info.value.context["time"] < 3.0


def test_trajectory_stops_at_escape_without_raising(source):
    opts = OPTS.model_copy(update={"escape_radius": 10.0})
    times = np.linspace(0.0, 10.0, 11)
    trajectory = flow_service.sample_trajectory(source, [1.0, 1.0], times, opts, raise_on_failure=False)

    assert trajectory.terminated is Termination.ESCAPED
    assert 0 < len(trajectory) < times.size
    assert trajectory.stop_time is not None
    assert np.linalg.norm(trajectory.final_state) <= 10.0


def test_negative_flow_time_is_rejected(diagonal):
    with pytest.raises(ValueError):
        flow_service.flow_to(diagonal, [1.0, 1.0], -1.0, OPTS)


def test_point_of_wrong_dimension(diagonal):
    with pytest.raises(DimensionMismatch):
        flow_service.flow_to(diagonal, [1.0, 1.0, 1.0], 1.0, OPTS)


def test_checkpoints_are_lazy(diagonal):
    times = np.arange(0.0, 1e6)
    first = list(islice(flow_service.iterate_checkpoints(diagonal, [1.0, 1.0], times, OPTS), 3))

    assert [t for t, _ in first] == [0.0, 1.0, 2.0]
    np.testing.assert_allclose(first[-1][1], [np.exp(-2.0), np.exp(-6.0)], atol=1e-10)


def test_checkpoints_must_increase(diagonal):
    with pytest.raises(ValueError):
        list(flow_service.iterate_checkpoints(diagonal, [1.0, 1.0], [0.0, 2.0, 1.0], OPTS))


def test_trajectory_config_validation():
    assert TrajectoryConfig(x0=[0.0, 1.0], t_end=5.0).samples == 101
    with pytest.raises(ValidationError):
        TrajectoryConfig(x0=[0.0, 1.0])
    with pytest.raises(ValidationError):
        TrajectoryConfig(x0=[0.0, 1.0], times=[0.0, 1.0, 1.0])
    with pytest.raises(ValidationError):
        TrajectoryConfig(x0=[0.0, 1.0], times=[-1.0, 1.0])


def test_integration_options_are_strict():
    with pytest.raises(ValidationError):
        IntegrationOptions(rel_tol=0.0)
    with pytest.raises(ValidationError):
        IntegrationOptions(method="Euler")
    with pytest.raises(ValidationError):
        IntegrationOptions(step=0.1)
