# pyboseglass/__init__.py

__version__ = "0.1.0"
__author__ = "Felix Holzmüller"
__license__ = "MIT"
__description__ = "Ground states, localization lengths and superradiant emission of a two-dimensional Bose glass."
__url__ = "https://git.iem.at/holzmueller/pyboseglass"
__status__ = "Development"


from .dtypes import (
    RadialGrid,
    RadialProfile,
    SolverOptions,
    GpProblem,
    GpSolution,
    ScanOptions,
    OptimalLake,
    CurvePoint,
    LocalizationCurve,
    FitParams,
    ThermoInput,
    ThermoState,
    EmissionModel,
    EmissionReport,
    PatternSample,
    DomainError,
    ConvergenceError,
    NotLocalizedError,
    NoLocalizedSolutionError,
    InsufficientDataError,
    RankError,
    ConfigError,
)

__all__ = [
    "RadialGrid",
    "RadialProfile",
    "SolverOptions",
    "GpProblem",
    "GpSolution",
    "ScanOptions",
    "OptimalLake",
    "CurvePoint",
    "LocalizationCurve",
    "FitParams",
    "ThermoInput",
    "ThermoState",
    "EmissionModel",
    "EmissionReport",
    "PatternSample",
    "DomainError",
    "ConvergenceError",
    "NotLocalizedError",
    "NoLocalizedSolutionError",
    "InsufficientDataError",
    "RankError",
    "ConfigError",
]

from . import numerics
from . import gp_core
from . import localization
from . import materials
from . import thermo
from . import superradiance

__all__.append("numerics")
__all__.append("gp_core")
__all__.append("localization")
__all__.append("materials")
__all__.append("thermo")
__all__.append("superradiance")
