"""Sharp large-deviation toolkit for matrix-product coefficients."""

__version__ = "0.1.0"

from .geometry import DualPoint, ProjPoint
from .kernels import BACKEND
from .model import MatrixModel, validate_model
from .rate import RateFunction, build_rate, cramer_h, legendre
from .spectral import SpectralData, solve_spectral

__all__ = [
    "BACKEND",
    "DualPoint",
    "MatrixModel",
    "ProjPoint",
    "RateFunction",
    "SpectralData",
    "build_rate",
    "cramer_h",
    "legendre",
    "solve_spectral",
    "validate_model",
    "__version__",
]
