from isostables.dynamics import routes as dynamics_routes
from isostables.field import routes as field_routes
from isostables.flow import routes as flow_routes
from isostables.spectrum import routes as spectrum_routes
from isostables.validation import routes as validation_routes

COMMAND_ROUTES = (
    dynamics_routes,
    spectrum_routes,
    flow_routes,
    field_routes,
    validation_routes,
)


def register_commands(subparsers, parent) -> None:
    """Add every subcommand to the parser"""
    for routes in COMMAND_ROUTES:
        routes.register(subparsers, parent)
