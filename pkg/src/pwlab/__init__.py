"""Generalized Post-Widder Laplace inversion and mixing-density estimation."""

__version__ = "0.1.0"

from .bell import BellTable, bell_argument, brute_force_f, build_table
from .curves import CurveSpec, g, gamma_const, kernel, moment_closed, moment_quadrature
from .errors import NumericalError, QuadratureError, UsageError
from .estimator import (
    EstimateResult, EstimatorConfig, NSelector, PostWidderDensityEstimator, estimate, select_n,
)
from .inversion import InversionResult, LaplaceOracle, builtin_oracle, invert, invert_via_kernel
from .logcx import LogComplex, from_complex, lsum, mul, pow_int, to_complex
from .mixture import MixingLaw, MixtureParams, Sample, psi, sample_mixture, xi

__all__ = [
    "BellTable", "CurveSpec", "EstimateResult", "EstimatorConfig", "InversionResult",
    "LaplaceOracle", "LogComplex", "MixingLaw", "MixtureParams", "NSelector",
    "NumericalError", "PostWidderDensityEstimator", "QuadratureError", "Sample", "UsageError",
    "bell_argument", "brute_force_f", "build_table", "builtin_oracle", "estimate",
    "from_complex", "g", "gamma_const", "invert", "invert_via_kernel", "kernel", "lsum",
    "moment_closed", "moment_quadrature", "mul", "pow_int", "psi", "sample_mixture",
    "select_n", "to_complex", "xi",
]
