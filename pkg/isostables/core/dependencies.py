import logging
from dataclasses import dataclass
from typing import List

from isostables.core.errors import MixedStability
from isostables.core.schemas import RunConfig
from isostables.dynamics.models import FixedPoint, VectorFieldModel
from isostables.dynamics.service import dynamics_service
from isostables.spectrum.models import Spectrum
from isostables.spectrum.service import spectrum_service

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunContext:
    model: VectorFieldModel
    fixed_point: FixedPoint
    spectrum: Spectrum
    extra_spectra: List[Spectrum]


def get_model(config: RunConfig) -> VectorFieldModel:
    return dynamics_service.build_model(config)


def get_fixed_point(model: VectorFieldModel) -> FixedPoint:
    fp = dynamics_service.find_fixed_point(model)
    logger.info(f"Fixed point of {model.name} at {fp.location.tolist()} (residual {fp.residual:.3e})")
    return fp


def get_spectrum(model: VectorFieldModel) -> Spectrum:
    fp = get_fixed_point(model)
    return spectrum_service.compute_spectrum(model, fp)


def get_context(config: RunConfig) -> RunContext:
    """Model, primary fixed point and spectrum, and the spectra of any further attractors."""
    model = get_model(config)
    spectrum = get_spectrum(model)

    extra_spectra = []
    for guess in config.attractors:
        fp = dynamics_service.find_fixed_point(model, guess)
        extra = spectrum_service.compute_spectrum(model, fp)
        if extra.stability is not spectrum.stability or extra.leading_class is not spectrum.leading_class:
            raise MixedStability("Attractors must share the stability and leading class of the primary fixed point",
                                 attractor=fp.location, leading_class=extra.leading_class.value)
        extra_spectra.append(extra)
    return RunContext(model=model, fixed_point=spectrum.fixed_point, spectrum=spectrum, extra_spectra=extra_spectra)
