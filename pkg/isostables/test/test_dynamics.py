import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError
from scipy.optimize import brentq

from isostables.core.errors import DimensionMismatch, NonFiniteField, SingularJacobian, UnknownModel
from isostables.dynamics.models import CallableModel, LinearSystem, TimeReversed
from isostables.dynamics.schemas import ModelConfig
from isostables.dynamics.service import dynamics_service

coordinates = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)


def test_fitzhugh_nagumo_rhs_at_origin(fn_real):
    np.testing.assert_allclose(dynamics_service.evaluate_rhs(fn_real, [0.0, 0.0]), [0.05, 0.0], atol=0.0)


def test_lorenz_jacobian_at_origin(lorenz_origin):
    expected = np.array([[-10.0, 10.0, 0.0], [0.5, -1.0, 0.0], [0.0, 0.0, -8.0 / 3.0]])
    np.testing.assert_allclose(dynamics_service.jacobian_at(lorenz_origin, np.zeros(3)), expected, atol=1e-15)


@given(st.lists(coordinates, min_size=2, max_size=2))
def test_linear_rhs_is_matrix_product(x):
    matrix = np.array([[-1.0, 0.4], [-0.3, -2.0]])
    model = LinearSystem(matrix=matrix)
    np.testing.assert_allclose(dynamics_service.evaluate_rhs(model, x), matrix @ np.array(x), rtol=1e-15, atol=1e-15)


def test_finite_difference_jacobian_matches_analytic(fn_real, lorenz_sinks):
    for model, point in ((fn_real, [0.3, -0.2]), (lorenz_sinks, [0.5, -1.0, 2.0])):
        analytic = dynamics_service.jacobian_at(model, point)
        numeric = dynamics_service.finite_difference_jacobian(model, point)
        np.testing.assert_allclose(numeric, analytic, atol=1e-8)


def test_check_jacobian_is_small_for_builtin_models(fn_complex, lorenz_origin):
    assert dynamics_service.check_jacobian(fn_complex, n_points=20, seed=1) < 1e-6
    assert dynamics_service.check_jacobian(lorenz_origin, n_points=20, seed=1) < 1e-6


def test_callable_model_without_jacobian_uses_finite_differences():
    model = CallableModel(n=2, field_fn=lambda x: np.array([-x[0] + x[1] ** 2, -2.0 * x[1]]))
    assert not model.has_jacobian
    np.testing.assert_allclose(dynamics_service.jacobian_at(model, [0.0, 1.0]), [[-1.0, 2.0], [0.0, -2.0]], atol=1e-9)


def test_time_reversed_flips_field_and_jacobian(fn_real):
    reversed_model = TimeReversed(base=fn_real)
    point = np.array([0.2, -0.4])
    np.testing.assert_array_equal(reversed_model.rhs(point), -fn_real.rhs(point))
    np.testing.assert_array_equal(reversed_model.jacobian(point), -fn_real.jacobian(point))


# ===============================================
# Fixed points
# ===============================================

def test_fixed_point_fitzhugh_nagumo_real_regime(fn_real):
    fp = dynamics_service.find_fixed_point(fn_real, [0.0, 0.0])
    v_star = brentq(lambda v: -v - v * (v - 1.0) ** 2 + 0.05, -0.5, 0.5, xtol=1e-15)

    assert fp.location[0] == pytest.approx(fp.location[1], abs=1e-12)
    assert fp.location[0] == pytest.approx(v_star, abs=1e-10)
    assert fp.location[0] == pytest.approx(0.02565, abs=1e-4)
    assert fp.residual <= 1e-12


def test_fixed_point_lorenz_picks_the_sink_near_the_guess(lorenz_sinks):
    fp = dynamics_service.find_fixed_point(lorenz_sinks, [1.0, 1.0, 1.0])
    c = np.sqrt(8.0 / 3.0)
    np.testing.assert_allclose(fp.location, [c, c, 1.0], atol=1e-10)

    mirrored = dynamics_service.find_fixed_point(lorenz_sinks, [-1.0, -1.0, 1.0])
    np.testing.assert_allclose(mirrored.location, [-c, -c, 1.0], atol=1e-10)


def test_fixed_point_already_converged_guess():
    model = LinearSystem(matrix=-np.eye(2) + np.array([[0.0, 0.1], [0.0, 0.0]]))
    fp = dynamics_service.find_fixed_point(model)
    assert fp.iterations == 0
    assert fp.residual == 0.0


def test_fixed_point_singular_jacobian():
    model = CallableModel(n=1, field_fn=lambda x: x ** 2 + 1.0, jacobian_fn=lambda x: np.array([[2.0 * x[0]]]))
    with pytest.raises(SingularJacobian):
        dynamics_service.find_fixed_point(model, [0.0])


def test_non_finite_field_is_reported():
    model = CallableModel(n=1, field_fn=lambda x: np.array([np.nan]))
    with pytest.raises(NonFiniteField) as exc_info:
        dynamics_service.evaluate_rhs(model, [1.0])
    assert exc_info.value.detail["error_code"] == "non_finite_field"


# ===============================================
# Model configs
# ===============================================

def test_build_model_from_config():
    config = ModelConfig(model="lorenz", params={"rho": 2.0}, domain=[(-3, 3)] * 3)
    model = dynamics_service.build_model(config)
    assert model.params["rho"] == 2.0
    assert model.domain_diagonal == pytest.approx(np.sqrt(3) * 6)


def test_build_model_unknown_name():
    with pytest.raises(UnknownModel):
        dynamics_service.build_model(ModelConfig(model="van_der_pol"))


def test_build_model_unknown_parameter():
    with pytest.raises(UnknownModel):
        dynamics_service.build_model(ModelConfig(model="fitzhugh_nagumo", params={"beta": 1.0}))


def test_build_model_domain_dimension_mismatch():
    config = ModelConfig(model="fitzhugh_nagumo", domain=[(-1, 1)] * 3)
    with pytest.raises(DimensionMismatch):
        dynamics_service.build_model(config)


def test_model_config_rejects_bad_input():
    with pytest.raises(ValidationError):
        ModelConfig(model="linear")
    with pytest.raises(ValidationError):
        ModelConfig(model="lorenz", domain=[(1, -1)] * 3)
    with pytest.raises(ValidationError):
        ModelConfig(model="lorenz", colour="red")
