import logging
import time
from argparse import Namespace
from pathlib import Path

import numpy as np

from isostables.core.config import settings
from isostables.core.dependencies import get_context
from isostables.core.errors import ConfigError, ExitCode, handle_cli_errors
from isostables.core.middleware import log_command
from isostables.core.output import write_json
from isostables.core.schemas import load_config
from isostables.field.contours import extract_contours
from isostables.field.io import read_field, write_contours, write_field
from isostables.field.schemas import ContourConfig, FieldSummary, Quantity
from isostables.field.service import field_service
from isostables.laplace.models import Status

logger = logging.getLogger(__name__)

DEFAULT_FIELD_NAME = "field.csv"


def contour_levels(request: ContourConfig, values: np.ndarray) -> list:
    """Explicit levels, or n evenly spaced ones: over [0, 2 pi) for phase, inside the field range otherwise."""
    if request.levels is not None:
        return list(request.levels)
    if request.quantity is Quantity.PHASE:
        return list(2.0 * np.pi * np.arange(request.n_levels) / request.n_levels)
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return []
    return list(np.linspace(finite.min(), finite.max(), request.n_levels + 2)[1:-1])


# ===============================================
# Field
# ===============================================

@log_command("field")
@handle_cli_errors
def field_command(args: Namespace) -> ExitCode:
    """Evaluate |s1|, angle s1 and tau on the configured grid"""
    config = load_config(args.config)
    if config.grid is None:
        raise ConfigError("The field command needs a 'grid' section", section="grid")
    context = get_context(config)
    workers = args.workers or settings.WORKERS

    start_time = time.time()
    field = field_service.evaluate_field(
        context.model,
        context.spectrum,
        config.grid,
        config.field.quantity,
        config.laplace_options(),
        workers=workers,
        extra_spectra=context.extra_spectra,
    )
    wall_time = time.time() - start_time

    destination = args.output or config.field.output
    if destination is None:
        destination = Path(args.output_dir or ".") / DEFAULT_FIELD_NAME
    header = write_field(field, Path(destination), with_timestamp=not args.no_timestamp)

    counts = field.counts()
    unsettled = {status: counts[status.value] for status in (Status.DIVERGED, Status.TRUNCATED, Status.GUARDED)}
    if any(unsettled.values()):
        logger.warning(
            ", ".join(f"{count} {status.value}" for status, count in unsettled.items()) + f" of {len(field)} points"
        )
    summary = FieldSummary(
        points=len(field),
        converged=counts[Status.CONVERGED.value],
        truncated=counts[Status.TRUNCATED.value],
        diverged=counts[Status.DIVERGED.value],
        guarded=counts[Status.GUARDED.value],
        experimental=counts[Status.EXPERIMENTAL.value],
        wall_time=wall_time,
        csv=str(destination),
        header=str(header),
    )
    write_json(summary)
    return ExitCode.SUCCESS


# ===============================================
# Contour
# ===============================================

@log_command("contour")
@handle_cli_errors
def contour_command(args: Namespace) -> ExitCode:
    """Extract level sets of a stored field; empty levels are warnings, not failures"""
    config = load_config(args.config)
    if config.contour is None:
        raise ConfigError("The contour command needs a 'contour' section", section="contour")
    if args.field is None:
        raise ConfigError("The contour command needs --field", resolution="Pass the CSV written by the field command")

    field = read_field(args.field)
    levels = contour_levels(config.contour, field.values(config.contour.quantity))
    contours = extract_contours(field, levels, config.contour.quantity)
    directory = Path(args.output_dir) if args.output_dir else Path(args.field).parent / "contours"
    index = write_contours(contours, directory, source=str(args.field), with_timestamp=not args.no_timestamp)
    write_json({
        "index": str(index),
        "levels": contours.levels,
        "empty_levels": contours.empty_levels,
    })
    return ExitCode.SUCCESS


def register(subparsers, parent) -> None:
    parser = subparsers.add_parser("field", parents=[parent], help="Evaluate eigenfunction quantities on a grid")
    parser.set_defaults(handler=field_command)
    parser = subparsers.add_parser("contour", parents=[parent], help="Extract isostables or isochrons from a field")
    parser.set_defaults(handler=contour_command)
