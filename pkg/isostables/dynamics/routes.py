from argparse import Namespace

from isostables.core.dependencies import get_model
from isostables.core.errors import ExitCode, handle_cli_errors
from isostables.core.middleware import log_command
from isostables.core.output import write_json
from isostables.core.schemas import load_config
from isostables.dynamics.schemas import FixedPointReport
from isostables.dynamics.service import dynamics_service


@log_command("fixed-point")
@handle_cli_errors
def fixed_point_command(args: Namespace) -> ExitCode:
    """Locate the fixed point by damped Newton iteration and print it"""
    config = load_config(args.config)
    model = get_model(config)
    fp = dynamics_service.find_fixed_point(model)
    report = FixedPointReport(
        model=model.name,
        params=model.params,
        location=fp.location.tolist(),
        residual=fp.residual,
        iterations=fp.iterations,
    )
    write_json(report, args.output)
    return ExitCode.SUCCESS


def register(subparsers, parent) -> None:
    parser = subparsers.add_parser("fixed-point", parents=[parent], help="Locate the hyperbolic fixed point")
    parser.set_defaults(handler=fixed_point_command)
