"""
anosov-lab exception hierarchy

Every error raised on purpose by the lab derives from AnosovLabError. The CLI maps the
three families below to stable exit codes: configuration (2), numeric (3), verification (4).
"""

from typing import Any, Dict, Optional


class AnosovLabError(Exception):
    """Base exception for anosov-lab errors"""

    exit_code = 3


class ConfigurationError(AnosovLabError):
    """Invalid run configuration, family parameters or input files"""

    exit_code = 2


class GridFormatError(ConfigurationError):
    """Malformed or inconsistent parameter grid file"""

    pass


class NumericError(AnosovLabError):
    """Numerical failure inside a computation"""

    exit_code = 3


class DegenerateMatrixError(NumericError):
    """Singular or near-singular matrix"""

    pass


class EigenvalueError(NumericError):
    """Eigenvalue or singular value iteration did not converge"""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NonProximalError(NumericError):
    """Top eigenvalue gap below tolerance"""

    pass


class EnumerationBudgetError(NumericError):
    """Word enumeration would exceed the configured budget"""

    pass


class PositivityError(NumericError):
    """Functional not positive on the sampled periods"""

    pass


class EstimationError(NumericError):
    """Too little data for an estimator (classes, scales or windows)"""

    pass


class BracketError(NumericError):
    """Bisection bracket does not contain a sign change"""

    pass


class VerificationError(AnosovLabError):
    """A verification suite criterion failed"""

    exit_code = 4
