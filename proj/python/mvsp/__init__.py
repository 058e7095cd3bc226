"""Multivariate quantum state preparation from Fourier and Chebyshev series."""

from ._mvsp import *  # noqa: F401,F403
from ._mvsp import (
    Basis,
    GridConvention,
    GridSpec,
    assemble_state_prep,
    simulate,
    success_probability_analytic,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
