"""Cosine, sine and Funk transforms on Stiefel manifolds.

This package evaluates the matrix cosine, sine and Funk transforms of functions
on V_{n,m} by Monte Carlo, together with the Siegel gamma function, Bernstein
polynomials and rank-one multipliers that govern their analytic continuation.
"""

from stiefel_transforms.gamma_toolkit import (
    bernstein_poly,
    cosine_const,
    funk_const,
    multiplier_c,
    siegel_gamma,
    stiefel_volume,
)
from stiefel_transforms.models import Frame, MCEstimate, SeededRng, SuiteReport
from stiefel_transforms.transforms import (
    cosine_transform,
    dual_cosine_transform,
    dual_funk_transform,
    dual_sine_transform,
    funk_transform,
    sine_transform,
)

__all__ = [
    "bernstein_poly",
    "cosine_const",
    "cosine_transform",
    "dual_cosine_transform",
    "dual_funk_transform",
    "dual_sine_transform",
    "funk_const",
    "funk_transform",
    "multiplier_c",
    "siegel_gamma",
    "sine_transform",
    "stiefel_volume",
    "Frame",
    "MCEstimate",
    "SeededRng",
    "SuiteReport",
]
