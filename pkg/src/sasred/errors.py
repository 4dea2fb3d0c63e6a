"""Exception hierarchy shared across the toolkit.

Each class maps onto one of the CLI exit codes (see :mod:`sasred.cli`).
"""


class SasredError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(SasredError):
    """Invalid run configuration or operation arguments."""


class NumericalError(SasredError):
    """Base class for failures of the numerical machinery."""


class EvaluationDomainError(NumericalError):
    """A function produced non-finite values, or a stencil left its domain."""


class RankDeficiencyError(NumericalError):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"linear dependence detected at vector {index}")


class RetractionError(NumericalError):
    def __init__(self, residual, message=None):
        self.residual = residual
        super().__init__(message or f"Newton retraction did not converge (residual {residual:.3e})")


class InfeasibleLevelSetError(NumericalError):
    """The zero level of the moment map is empty."""


class RegularityError(NumericalError):
    """Zero is not a regular value (the moment differential lost rank)."""


class DegenerateOrbitError(NumericalError):
    """An orbit through the point is degenerate (some fundamental field vanishes)."""


class NotApplicableError(SasredError):
    """A check does not apply to the given weights."""


class ChartDomainError(EvaluationDomainError):
    """A chart was evaluated (or a stencil reached) outside its radius."""
