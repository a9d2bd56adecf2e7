"""
Exception hierarchy for KPP Front Lab

Every error carries the exit code the CLI reports for it.
"""

from typing import Optional

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_INVALID_PARAMETERS = 2
EXIT_NOT_CONVERGED = 3


class LabError(Exception):
    """Base error with an associated CLI exit code"""

    exit_code: int = EXIT_VERIFICATION_FAILED

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class ParameterDomainError(LabError, ValueError):
    """Parameters outside the admissible range"""

    exit_code = EXIT_INVALID_PARAMETERS


class DomainError(LabError, ValueError):
    """Argument outside the domain of a function"""

    exit_code = EXIT_INVALID_PARAMETERS


class PoleError(LabError, ValueError):
    """Evaluation at the pole of a rational map"""

    exit_code = EXIT_INVALID_PARAMETERS


class ConfigParseError(LabError, ValueError):
    """Malformed or unknown entry in a run configuration file"""

    exit_code = EXIT_INVALID_PARAMETERS

    def __init__(self, detail: str, line_number: Optional[int] = None):
        if line_number is not None:
            detail = f"line {line_number}: {detail}"
        super().__init__(detail)
        self.line_number = line_number


class StabilityError(LabError, ValueError):
    """Explicit time step beyond the stability limit"""

    exit_code = EXIT_INVALID_PARAMETERS


class QuadratureError(LabError, RuntimeError):
    """Quadrature tolerance not met within the subdivision budget"""

    exit_code = EXIT_NOT_CONVERGED


class ConvergenceError(LabError, RuntimeError):
    """Iterative solver did not converge"""

    exit_code = EXIT_NOT_CONVERGED


class SimulationError(LabError, RuntimeError):
    """NaN or negative values during a simulation"""

    exit_code = EXIT_NOT_CONVERGED


class NoFrontError(LabError, RuntimeError):
    """No level crossing found in a field"""

    exit_code = EXIT_NOT_CONVERGED


class ConsistencyError(LabError, RuntimeError):
    """A proven inequality failed beyond tolerance"""

    exit_code = EXIT_VERIFICATION_FAILED


class DegenerateDerivativeError(LabError, ArithmeticError):
    """First derivative too small for a Schwarzian derivative"""

    exit_code = EXIT_VERIFICATION_FAILED
