"""Solver and checks for ``v = v0 + int_0^t (t-s)**(lam-1) v(s) ds``.

Covers the weakly singular range ``lam`` in (0, 1] and the hyper-singular
case ``lam = -1/4``, where the integral is read as a finite part.
"""

from __future__ import annotations

from hypervolt.asymptotics import (
    PowerLawFit,
    estimate_power_law,
    onset_prediction,
    tail_prediction,
    tauberian_map,
)
from hypervolt.errors import (
    ContourPoleError,
    ConvergenceError,
    DomainError,
    GammaPoleError,
    HypervoltError,
    InadmissibleLambdaError,
    InversionOverflowError,
    NumericalError,
    PoleError,
    UnsupportedError,
    ValidationError,
)
from hypervolt.kernel import PowerKernel, check_lambda, continued_symbol, finite_part_primitive, laplace_symbol
from hypervolt.profiles import CATALOG, SourceProfile, get_profile, load_sample_file, resolve_profile
from hypervolt.resolvent import (
    SolutionGrid,
    multiplier,
    resolvent_kernel,
    solve_via_inversion,
    solve_via_resolvent,
)
from hypervolt.singular_residual import ResidualReport, finite_part_convolution, residual
from hypervolt.special import gamma, mittag_leffler
from hypervolt.transform import InversionConfig, laplace_forward, laplace_invert
from hypervolt.volterra_direct import StepperConfig, product_weights, solve_product_integration

__version__ = "0.1.0"

__all__ = [
    "CATALOG",
    "ContourPoleError",
    "ConvergenceError",
    "DomainError",
    "GammaPoleError",
    "HypervoltError",
    "InadmissibleLambdaError",
    "InversionConfig",
    "InversionOverflowError",
    "NumericalError",
    "PoleError",
    "PowerKernel",
    "PowerLawFit",
    "ResidualReport",
    "SolutionGrid",
    "SourceProfile",
    "StepperConfig",
    "UnsupportedError",
    "ValidationError",
    "check_lambda",
    "continued_symbol",
    "estimate_power_law",
    "finite_part_convolution",
    "finite_part_primitive",
    "gamma",
    "get_profile",
    "laplace_forward",
    "laplace_invert",
    "laplace_symbol",
    "load_sample_file",
    "mittag_leffler",
    "multiplier",
    "onset_prediction",
    "product_weights",
    "residual",
    "resolve_profile",
    "resolvent_kernel",
    "solve_product_integration",
    "solve_via_inversion",
    "solve_via_resolvent",
    "tail_prediction",
    "tauberian_map",
]
