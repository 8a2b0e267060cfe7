from argparse import Namespace

from isostables.core.dependencies import get_model, get_spectrum
from isostables.core.errors import ExitCode, handle_cli_errors
from isostables.core.middleware import log_command
from isostables.core.output import write_json
from isostables.core.schemas import load_config
from isostables.spectrum.service import spectrum_service


@log_command("spectrum")
@handle_cli_errors
def spectrum_command(args: Namespace) -> ExitCode:
    """Print the fixed point with its sorted, normalized eigenpairs"""
    config = load_config(args.config)
    model = get_model(config)
    spectrum = get_spectrum(model)
    write_json(spectrum_service.report(model, spectrum), args.output)
    return ExitCode.SUCCESS


def register(subparsers, parent) -> None:
    parser = subparsers.add_parser("spectrum", parents=[parent], help="Report the Jacobian spectrum at the fixed point")
    parser.set_defaults(handler=spectrum_command)
