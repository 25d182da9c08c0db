"""Spectral-domain analysis of a dipole-excited PEC strip above a PEC ground plane."""

__version__ = "0.1.0"

from .emcore import Dipole, Medium, Scenario
from .errors import (ConfigError, ContourError, DegenerateSpectralPoint, PoleProximityError,
                     QuadratureError, SingularSystemError, StripError)
from .solver import SpectralSolution, solve_fullwave, solve_narrow_strip

__all__ = [
    "Dipole", "Medium", "Scenario", "SpectralSolution", "solve_fullwave",
    "solve_narrow_strip", "StripError", "ConfigError", "ContourError",
    "DegenerateSpectralPoint", "PoleProximityError", "QuadratureError",
    "SingularSystemError",
]
