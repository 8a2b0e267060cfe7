import functools
import json
import logging
import sys
from enum import IntEnum
from typing import Any, Callable, Dict, Optional

from pydantic import ValidationError

from isostables.core.output import dumps

logger = logging.getLogger(__name__)


class ExitCode(IntEnum):
    SUCCESS = 0
    VALIDATION_FAILURE = 1
    CONFIG_ERROR = 2
    NUMERIC_FAILURE = 3


class IsostableError(Exception):
    """Base error carrying a structured detail dictionary."""

    message: str = "Computation failed"
    error_code: str = "isostable_error"
    resolution: Optional[str] = None
    exit_code: ExitCode = ExitCode.NUMERIC_FAILURE

    def __init__(self, message: Optional[str] = None, resolution: Optional[str] = None, **context: Any):
        self.message = message or self.message
        if resolution is not None:
            self.resolution = resolution
        self.context = context
        super().__init__(self.message)

    @property
    def detail(self) -> Dict[str, Any]:
        detail: Dict[str, Any] = {
            "message": self.message,
            "error_code": self.error_code,
        }
        if self.resolution:
            detail["resolution"] = self.resolution
        detail.update(self.context)
        return detail


# ===============================================
# Configuration errors
# ===============================================

class ConfigError(IsostableError):
    message = "Invalid run configuration"
    error_code = "invalid_config"
    resolution = "Check the JSON config against the documented schema"
    exit_code = ExitCode.CONFIG_ERROR


class UnknownModel(ConfigError):
    message = "Model is not registered"
    error_code = "unknown_model"
    resolution = "Use one of: fitzhugh_nagumo, lorenz, linear"


class DimensionMismatch(ConfigError):
    message = "Point dimension does not match the model dimension"
    error_code = "dimension_mismatch"


class ValidationFailed(IsostableError):
    message = "One or more validation checks failed"
    error_code = "validation_failed"
    exit_code = ExitCode.VALIDATION_FAILURE


# ===============================================
# Dynamics errors
# ===============================================

class NonFiniteField(IsostableError):
    message = "Vector field returned a non-finite value"
    error_code = "non_finite_field"
    resolution = "Restrict evaluation to the model domain"


class NoConvergence(IsostableError):
    message = "Newton iteration did not converge"
    error_code = "no_convergence"
    resolution = "Supply a guess closer to the fixed point"


class SingularJacobian(IsostableError):
    message = "Newton step could not be solved: Jacobian is singular"
    error_code = "singular_jacobian"
    resolution = "Supply a different guess"


# ===============================================
# Spectrum errors
# ===============================================

class RepeatedEigenvalue(IsostableError):
    message = "Jacobian has repeated eigenvalues"
    error_code = "repeated_eigenvalue"
    resolution = "Star and degenerate nodes are not supported"


class MixedStability(IsostableError):
    message = "Fixed point is a saddle"
    error_code = "mixed_stability"
    resolution = "Isostables require a fixed point that is stable or unstable in every direction"


class Nonhyperbolic(IsostableError):
    message = "Fixed point is not hyperbolic"
    error_code = "nonhyperbolic"


class RealLeadingEigenvalue(IsostableError):
    message = "Leading eigenvalue is real: no reduced period"
    error_code = "real_leading_eigenvalue"


class LeadingClassMismatch(IsostableError):
    message = "Operation does not apply to this leading eigenvalue class"
    error_code = "leading_class_mismatch"


# ===============================================
# Flow errors
# ===============================================

class Escaped(IsostableError):
    message = "Trajectory left the escape radius"
    error_code = "escaped"


class Stalled(IsostableError):
    message = "Integrator step size underflow"
    error_code = "stalled"


# ===============================================
# Laplace average errors
# ===============================================

class DegenerateSpan(IsostableError):
    message = "Real and imaginary parts of the leading eigenvector are nearly parallel"
    error_code = "degenerate_span"


class Diverged(IsostableError):
    message = "Point lies outside the basin of the fixed point"
    error_code = "diverged"


class GuardTriggered(IsostableError):
    message = "Numerical instability detected before any stable estimate"
    error_code = "guard_triggered"
    resolution = "Reduce the horizon or tighten the integration tolerances"


class ZeroProjection(IsostableError):
    message = "Observable gradient is orthogonal to the leading eigenvector"
    error_code = "zero_projection"
    resolution = "Choose an observable with a nonzero component along v1"
    exit_code = ExitCode.CONFIG_ERROR


class ZeroMagnitude(IsostableError):
    message = "Magnitude must be strictly positive"
    error_code = "zero_magnitude"


class ExperimentalResult(IsostableError):
    message = "Generalized Laplace averages of nonlinear models have no accuracy guarantee"
    error_code = "experimental"
    resolution = "Set allow_experimental to accept the result"


class SubtractionLoss(IsostableError):
    message = "First-mode subtraction error dominates the generalized average"
    error_code = "subtraction_loss"
    resolution = "Shorten the generalized horizon or tighten tolerances"


class HigherModeResidual(IsostableError):
    message = "Modes beyond the second leave a residual in the generalized average"
    error_code = "higher_mode_residual"
    resolution = "Use the default observable, which is dual to v2 and annihilates the other modes"


class UnsupportedEigenfunction(IsostableError):
    message = "Only the first two eigenfunctions are supported"
    error_code = "unsupported_eigenfunction"
    exit_code = ExitCode.CONFIG_ERROR


class EmptyLevel(IsostableError):
    message = "Level lies outside the field range"
    error_code = "empty_level"


# ===============================================
# CLI error handler
# ===============================================

def _report(detail: Dict[str, Any]) -> None:
    sys.stderr.write(dumps(detail) + "\n")


def handle_cli_errors(command: Callable[..., ExitCode]) -> Callable[..., ExitCode]:
    """Map exceptions raised by a command onto exit codes and a JSON diagnostic."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs) -> ExitCode:
        try:
            return command(*args, **kwargs)
        except ValidationError as exc:
            _report({
                "message": "Config failed schema validation",
                "error_code": "invalid_config",
                "errors": json.loads(exc.json()),
            })
            return ExitCode.CONFIG_ERROR
        except json.JSONDecodeError as exc:
            _report({
                "message": f"Config is not valid JSON: {exc.msg}",
                "error_code": "invalid_json",
                "line": exc.lineno,
            })
            return ExitCode.CONFIG_ERROR
        except IsostableError as exc:
            logger.debug("%s raised %s", command.__name__, exc.error_code)
            _report(exc.detail)
            return exc.exit_code
        except OSError as exc:
            _report({
                "message": str(exc),
                "error_code": "io_error",
            })
            return ExitCode.CONFIG_ERROR

    return wrapper
