import numpy as np
import pytest
from hypothesis import settings as hypothesis_settings

from isostables.dynamics.models import FitzHughNagumo, LinearSystem, Lorenz
from isostables.test.helpers import spectrum_of

hypothesis_settings.register_profile("isostables", max_examples=25, deadline=None)
hypothesis_settings.load_profile("isostables")


# ===============================================
# Models
# ===============================================

@pytest.fixture(scope="session")
def fn_real():
    return FitzHughNagumo(I=0.05, eps=0.08, gamma=1.0, a=1.0)


@pytest.fixture(scope="session")
def fn_complex():
    return FitzHughNagumo(I=0.05, eps=0.08, gamma=1.0, a=0.1)


@pytest.fixture(scope="session")
def lorenz_origin():
    return Lorenz(rho=0.5)


@pytest.fixture(scope="session")
def lorenz_sinks():
    return Lorenz(rho=2.0)


@pytest.fixture(scope="session")
def diagonal():
    """x' = -x, y' = -3y: s1 = x, s2 = y"""
    return LinearSystem(matrix=np.diag([-1.0, -3.0]))


@pytest.fixture(scope="session")
def spiral():
    """lambda = -0.1 +/- i"""
    return LinearSystem(matrix=np.array([[-0.1, 1.0], [-1.0, -0.1]]), domain=((-2.0, 2.0), (-2.0, 2.0)))


@pytest.fixture(scope="session")
def source():
    return LinearSystem(matrix=np.diag([1.0, 2.0]))


# ===============================================
# Spectra
# ===============================================

@pytest.fixture(scope="session")
def fn_real_spectrum(fn_real):
    return spectrum_of(fn_real)


@pytest.fixture(scope="session")
def fn_complex_spectrum(fn_complex):
    return spectrum_of(fn_complex)


@pytest.fixture(scope="session")
def lorenz_origin_spectrum(lorenz_origin):
    return spectrum_of(lorenz_origin)


@pytest.fixture(scope="session")
def lorenz_sink_spectra(lorenz_sinks):
    return spectrum_of(lorenz_sinks, [1.0, 1.0, 1.0]), spectrum_of(lorenz_sinks, [-1.0, -1.0, 1.0])


@pytest.fixture(scope="session")
def diagonal_spectrum(diagonal):
    return spectrum_of(diagonal)


@pytest.fixture(scope="session")
def spiral_spectrum(spiral):
    return spectrum_of(spiral)


@pytest.fixture(scope="session")
def source_spectrum(source):
    return spectrum_of(source)
