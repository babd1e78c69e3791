"""Series solutions of a non-local Laplace problem on the half-strip (0, 2pi) x (0, inf).

Subpackages are imported lazily by users; the names below are the common entry points.
"""
from .basis import BiorthoSpectrum, biortho_coefficients, biortho_gram, projector_snm, synthesize
from .errors import StriphError
from .quadrature import Grid2D, Interval, ScalarFunction1D, integrate, make_uniform_grid2d
from .solver import BoundaryDatum, StripSolution, calibrate_lambda, solve
from .verification import strong_solution_check
from .weights import Weight, muckenhoupt_constant, parse_weight

__version__ = "0.1.0"

__all__ = [
    "BiorthoSpectrum",
    "BoundaryDatum",
    "Grid2D",
    "Interval",
    "ScalarFunction1D",
    "StripSolution",
    "StriphError",
    "Weight",
    "biortho_coefficients",
    "biortho_gram",
    "calibrate_lambda",
    "integrate",
    "make_uniform_grid2d",
    "muckenhoupt_constant",
    "parse_weight",
    "projector_snm",
    "solve",
    "strong_solution_check",
    "synthesize",
]
