"""Smoothness of max functions and eigenvalue extrema, with the C^3
crossing counterexample and level-set solvers built on top."""

__version__ = "0.1.0"

from .errors import (
    CapabilityError,
    DomainError,
    EigSmoothError,
    NumericalError,
    PoleError,
    PreconditionError,
    ResolutionError,
)
from .maxfun import ActiveSet, MaxFunction, QuadraticModel, ScalarFunction
from .counterexample import CounterexampleFunction, SlopeSequence
from .eigfamily import ExtremalFunction, HermitianFamily, MatrixFamily
from .lti import LtiSystem
from .report import SolveReport

__all__ = [
    "ActiveSet",
    "CapabilityError",
    "CounterexampleFunction",
    "DomainError",
    "EigSmoothError",
    "ExtremalFunction",
    "HermitianFamily",
    "LtiSystem",
    "MatrixFamily",
    "MaxFunction",
    "NumericalError",
    "PoleError",
    "PreconditionError",
    "QuadraticModel",
    "ResolutionError",
    "ScalarFunction",
    "SlopeSequence",
    "SolveReport",
]
