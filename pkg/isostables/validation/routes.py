from argparse import Namespace

from isostables.core.dependencies import get_context
from isostables.core.errors import ExitCode, ValidationFailed, handle_cli_errors
from isostables.core.middleware import log_command
from isostables.core.output import write_json
from isostables.core.schemas import load_config
from isostables.validation.service import validation_service


@log_command("validate")
@handle_cli_errors
def validate_command(args: Namespace) -> ExitCode:
    """Run the invariant suite; the report is written before a failure is signalled"""
    config = load_config(args.config)
    context = get_context(config)
    report = validation_service.run(
        context.model,
        context.spectrum,
        config.validate_,
        config.laplace_options(),
        with_timestamp=not args.no_timestamp,
    )
    write_json(report, args.output)
    if not report.passed:
        raise ValidationFailed(failed=sorted({check.name for check in report.failures}))
    return ExitCode.SUCCESS


def register(subparsers, parent) -> None:
    parser = subparsers.add_parser("validate", parents=[parent], help="Run the invariant and oracle checks")
    parser.set_defaults(handler=validate_command)
