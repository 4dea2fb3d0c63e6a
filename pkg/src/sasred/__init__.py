"""Numerical verification of Sasakian reduction for weighted torus actions on odd spheres."""
from .action import TorusAction
from .errors import (ConfigError, InfeasibleLevelSetError, NotApplicableError, NumericalError,
                     RegularityError, RetractionError, SasredError)
from .levelset import LevelPoint, retract
from .quotient import SliceChart
from .registry import lookup
from .report import RunConfig, VerificationReport
from .runner import run, run_example

__all__ = [
    "TorusAction", "LevelPoint", "retract", "SliceChart", "lookup", "RunConfig",
    "VerificationReport", "run", "run_example", "SasredError", "ConfigError", "NumericalError",
    "InfeasibleLevelSetError", "RegularityError", "RetractionError", "NotApplicableError",
]
__version__ = "0.1.0"
