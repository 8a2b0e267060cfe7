import math

import numpy as np
import pytest

from isostables.core.errors import MixedStability, Nonhyperbolic, RealLeadingEigenvalue, RepeatedEigenvalue
from isostables.dynamics.models import LinearSystem
from isostables.spectrum.models import LeadingClass, Stability
from isostables.spectrum.service import spectrum_service
from isostables.test.helpers import spectrum_of


def test_fitzhugh_nagumo_real_regime(fn_real_spectrum):
    spectrum = fn_real_spectrum
    assert spectrum.leading_class is LeadingClass.REAL
    assert spectrum.stability is Stability.STABLE
    assert spectrum.sigma1 == pytest.approx(-0.1933, rel=1e-2)
    assert spectrum.eigenvalues[1].real == pytest.approx(-0.7861, rel=1e-2)

    v2 = spectrum.right_vectors[:, 1].real
    assert v2[1] / v2[0] == pytest.approx(-0.1133, abs=1e-3)


def test_fitzhugh_nagumo_spiral_regime(fn_complex_spectrum):
    spectrum = fn_complex_spectrum
    assert spectrum.leading_class is LeadingClass.COMPLEX_PAIR
    assert spectrum.sigma1 == pytest.approx(-0.041, rel=2e-2)
    np.testing.assert_allclose(spectrum.a, [0.96, 0.03], atol=0.05)
    np.testing.assert_allclose(spectrum.b, [0.0, 0.27], atol=0.05)
    assert spectrum_service.reduced_period(spectrum) == pytest.approx(22.4, rel=1e-2)


def test_lorenz_origin_spectrum(lorenz_origin_spectrum):
    spectrum = lorenz_origin_spectrum
    np.testing.assert_allclose(spectrum.center, np.zeros(3), atol=1e-12)
    assert spectrum.leading_class is LeadingClass.REAL
    expected = [(-11 + math.sqrt(101)) / 2, -8.0 / 3.0, (-11 - math.sqrt(101)) / 2]
    np.testing.assert_allclose(spectrum.eigenvalues.real, expected, rtol=1e-10)


def test_lorenz_sink_spectrum(lorenz_sink_spectra):
    spectrum, mirrored = lorenz_sink_spectra
    assert spectrum.leading_class is LeadingClass.COMPLEX_PAIR
    assert spectrum.sigma1 == pytest.approx(-1.213, abs=5e-3)
    assert spectrum.omega1 == pytest.approx(1.809, abs=5e-3)
    np.testing.assert_allclose(mirrored.eigenvalues, spectrum.eigenvalues, rtol=1e-10)


@pytest.mark.parametrize("name", ["fn_real_spectrum", "fn_complex_spectrum", "lorenz_origin_spectrum",
                                  "spiral_spectrum"])
def test_biorthogonality_and_reconstruction(name, request):
    spectrum = request.getfixturevalue(name)
    gram = spectrum.left_vectors.conj().T @ spectrum.right_vectors
    np.testing.assert_allclose(gram, np.eye(spectrum.dim), atol=1e-10)

    rng = np.random.default_rng(3)
    for x in rng.normal(size=(10, spectrum.dim)):
        coordinates = [np.vdot(spectrum.left_vectors[:, j], x) for j in range(spectrum.dim)]
        rebuilt = spectrum.right_vectors @ np.array(coordinates)
        np.testing.assert_allclose(rebuilt.real, x, atol=1e-10)
        np.testing.assert_allclose(rebuilt.imag, 0.0, atol=1e-10)


def test_eigenpairs_satisfy_eigen_equations(lorenz_sink_spectra):
    spectrum, _ = lorenz_sink_spectra
    jac = spectrum.jacobian
    for j in range(spectrum.dim):
        lam, v, w = spectrum.eigenvalues[j], spectrum.right_vectors[:, j], spectrum.left_vectors[:, j]
        np.testing.assert_allclose(jac @ v, lam * v, atol=1e-10)
        np.testing.assert_allclose(jac.T @ w, np.conj(lam) * w, atol=1e-10)


def test_conjugate_partner_is_exact(spiral_spectrum):
    spectrum = spiral_spectrum
    assert spectrum.eigenvalues[0].imag > 0
    assert spectrum.eigenvalues[1] == np.conj(spectrum.eigenvalues[0])
    np.testing.assert_array_equal(spectrum.right_vectors[:, 1], np.conj(spectrum.right_vectors[:, 0]))


def test_phase_convention(fn_complex_spectrum):
    v1 = fn_complex_spectrum.v1
    k = int(np.argmax(np.abs(v1)))
    assert np.linalg.norm(v1) == pytest.approx(1.0, abs=1e-14)
    assert v1[k].imag == 0.0 and v1[k].real > 0


def test_spectrum_is_deterministic(fn_complex):
    first, second = spectrum_of(fn_complex), spectrum_of(fn_complex)
    np.testing.assert_array_equal(first.right_vectors, second.right_vectors)
    assert first.fingerprint() == second.fingerprint()


def test_spectrum_arrays_are_read_only(diagonal_spectrum):
    with pytest.raises(ValueError):
        diagonal_spectrum.eigenvalues[0] = 0.0


def test_reduced_period(spiral_spectrum, diagonal_spectrum):
    assert spectrum_service.reduced_period(spiral_spectrum) == pytest.approx(2 * math.pi, rel=1e-12)
    fast = spectrum_of(LinearSystem(matrix=np.array([[-1.0, 4.0], [-4.0, -1.0]])))
    assert spectrum_service.reduced_period(fast) == pytest.approx(math.pi / 2, rel=1e-12)
    with pytest.raises(RealLeadingEigenvalue):
        spectrum_service.reduced_period(diagonal_spectrum)


def test_source_is_followed_backward(source_spectrum):
    spectrum = source_spectrum
    assert spectrum.stability is Stability.UNSTABLE
    assert spectrum.lambda1 == pytest.approx(1.0)
    assert spectrum.time_sign == -1
    assert spectrum.effective_sigma1 == pytest.approx(-1.0)


def test_projection_is_linear_eigenfunction(diagonal_spectrum):
    assert diagonal_spectrum.project([2.0, 5.0]) == pytest.approx(2.0)
    assert diagonal_spectrum.project([2.0, 5.0], j=2) == pytest.approx(5.0)


@pytest.mark.parametrize("matrix, error", [
    ([[-1.0, 0.0], [0.0, -1.0]], RepeatedEigenvalue),
    ([[-1.0, 0.0], [0.0, 1.0]], MixedStability),
    ([[0.0, 1.0], [-1.0, 0.0]], Nonhyperbolic),
])
def test_rejected_spectra(matrix, error):
    with pytest.raises(error):
        spectrum_of(LinearSystem(matrix=np.array(matrix)))


def test_report_lists_every_eigenpair(fn_real, fn_real_spectrum):
    report = spectrum_service.report(fn_real, fn_real_spectrum)
    assert report.leading_class == "Real"
    assert report.reduced_period is None
    assert [pair.index for pair in report.eigenpairs] == [1, 2]
    assert report.fingerprint == fn_real_spectrum.fingerprint()
