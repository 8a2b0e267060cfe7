import logging
from argparse import Namespace

import numpy as np

from isostables.core.dependencies import get_fixed_point, get_model
from isostables.core.errors import ConfigError, ExitCode, handle_cli_errors
from isostables.core.middleware import log_command
from isostables.core.output import write_csv
from isostables.core.schemas import load_config
from isostables.flow.models import Termination
from isostables.flow.service import flow_service

logger = logging.getLogger(__name__)


@log_command("trajectory")
@handle_cli_errors
def trajectory_command(args: Namespace) -> ExitCode:
    """Sample a trajectory and write it as CSV (t, x1..xn); escape is measured from x*"""
    config = load_config(args.config)
    if config.trajectory is None:
        raise ConfigError("The trajectory command needs a 'trajectory' section", section="trajectory")
    model = get_model(config)
    request = config.trajectory
    if request.times is not None:
        times = np.asarray(request.times, dtype=float)
    else:
        times = np.linspace(0.0, request.t_end, request.samples)

    center = get_fixed_point(model).location
    trajectory = flow_service.sample_trajectory(model, request.x0, times, config.integration,
                                                center=center, raise_on_failure=False)
    if trajectory.terminated is Termination.COMPLETED:
        logger.info(f"Trajectory completed with {len(trajectory)} samples")
    header = ["t"] + [f"x{i + 1}" for i in range(model.dim)]
    rows = ([t, *state] for t, state in zip(trajectory.times, trajectory.states))
    write_csv(header, rows, args.output)
    return ExitCode.SUCCESS


def register(subparsers, parent) -> None:
    parser = subparsers.add_parser("trajectory", parents=[parent], help="Sample a trajectory of the model")
    parser.set_defaults(handler=trajectory_command)
