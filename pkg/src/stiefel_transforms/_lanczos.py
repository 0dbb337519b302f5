"""Lanczos approximation of the complex gamma function.

Independent of :mod:`scipy.special`; used as the second implementation when
cross-checking the Siegel gamma product.
"""

from __future__ import annotations

import cmath
import math

LANCZOS_G = 7
LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def lanczos_gamma(z: complex) -> complex:
    """Gamma(z) for complex z, with reflection for Re z < 1/2."""
    z = complex(z)
    if z.real < 0.5:
        # Reflection formula
        return math.pi / (cmath.sin(math.pi * z) * lanczos_gamma(1 - z))

    z -= 1
    x = LANCZOS_COEFFS[0]
    for i in range(1, len(LANCZOS_COEFFS)):
        x += LANCZOS_COEFFS[i] / (z + i)

    t = z + LANCZOS_G + 0.5
    return math.sqrt(2 * math.pi) * t ** (z + 0.5) * cmath.exp(-t) * x
