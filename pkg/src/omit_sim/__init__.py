"""Linear-response simulator for optomechanically induced transparency.

Internal units are SI with angular frequencies in rad/s and an
``exp(-i omega t)`` time dependence.
"""
from .errors import (
    ConfigError,
    ConvergenceError,
    DegenerateInputError,
    OmitSimError,
    ParameterError,
)
from .params import CavityParams, CouplingParams, DriveParams, MechanicalParams, SystemParams
from .response import group_delay, omit_width, peak_transparency, transmission
from .steady_state import OperatingPoint, operating_point, solve_steady_state

__version__ = "0.1.0"

__all__ = [
    "CavityParams",
    "ConfigError",
    "ConvergenceError",
    "CouplingParams",
    "DegenerateInputError",
    "DriveParams",
    "MechanicalParams",
    "OmitSimError",
    "OperatingPoint",
    "ParameterError",
    "SystemParams",
    "group_delay",
    "omit_width",
    "operating_point",
    "peak_transparency",
    "solve_steady_state",
    "transmission",
]
