import numpy as np

from isostables.dynamics.service import dynamics_service
from isostables.field.models import ScalarField
from isostables.field.schemas import GridSpec
from isostables.spectrum.service import spectrum_service


def spectrum_of(model, guess=None):
    fp = dynamics_service.find_fixed_point(model, guess)
    return spectrum_service.compute_spectrum(model, fp)


def field_from_values(bounds, resolution, function):
    """A ScalarField whose magnitude, phase and tau all hold function(points)."""
    grid = GridSpec(bounds=bounds, resolution=resolution)
    points = grid.sample_points()
    values = np.asarray(function(points), dtype=float)
    return ScalarField(
        grid=grid,
        points=points,
        magnitude=values,
        phase=values,
        tau=values,
        status=np.full(len(points), "Converged"),
        s1=values.astype(complex),
        basin=np.zeros(len(points), dtype=int),
    )


def wrapped(angle):
    return float(np.angle(np.exp(1j * angle)))
