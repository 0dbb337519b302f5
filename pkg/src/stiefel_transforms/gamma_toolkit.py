"""Scalar special functions and normalising constants.

Everything here is pure: Siegel gamma of the positive definite cone, Stiefel
volumes, Bernstein polynomials of the Cayley-Laplace operator, and the constants
appearing in closed forms, normalisations and rank-one multipliers.
"""

from __future__ import annotations

import cmath
import math
from typing import Literal

from scipy import special

from stiefel_transforms._lanczos import lanczos_gamma
from stiefel_transforms.errors import DimensionError, ExcludedParamError, PoleError
from stiefel_transforms.models import ComplexParam, GammaEvalResult

# Absolute distance to a pole below which a gamma factor counts as singular.
POLE_EPS = 1e-8

LOG_PI = math.log(math.pi)

ParamLike = ComplexParam | complex | float

Backend = Literal["scipy", "lanczos"]


def _as_complex(a: ParamLike) -> complex:
    return ComplexParam.coerce(a).value


def gamma_pole_distance(z: complex) -> float:
    """Distance from z to the nearest pole {0, -1, -2, ...} of Gamma."""
    nearest = min(0.0, float(round(z.real)))
    return abs(z - nearest)


def siegel_pole_distance(m: int, a: ParamLike) -> float:
    """Distance from a to the polar set of Gamma_m.

    Gamma_m(a) has a pole whenever some factor Gamma(a - j/2), j < m, does, so
    the set is {(m - 1 - j)/2 : j >= 0} for m >= 2 and the non-positive integers
    for m = 1.
    """
    z = _as_complex(a)
    return min(gamma_pole_distance(z - j / 2) for j in range(m))


def _check_rank(m: int) -> None:
    if m < 1:
        raise DimensionError(f"Siegel gamma needs m >= 1, got m={m}")


def siegel_gamma(
    m: int,
    a: ParamLike,
    *,
    strict: bool = True,
    backend: Backend = "scipy",
) -> GammaEvalResult:
    """Gamma_m(a) = pi^{m(m-1)/4} prod_{j<m} Gamma(a - j/2).

    Args:
        m: Size of the positive definite cone.
        a: Complex argument.
        strict: Raise PoleError at a pole instead of flagging it.
        backend: ``"scipy"`` or the independent ``"lanczos"`` implementation.

    Returns:
        GammaEvalResult; ``value`` is NaN when ``at_pole`` is set.
    """
    _check_rank(m)
    z = _as_complex(a)
    distance = siegel_pole_distance(m, z)
    if distance < POLE_EPS:
        if strict:
            raise PoleError(f"Gamma_{m}({z}) is within {POLE_EPS} of a pole")
        return GammaEvalResult(complex("nan"), at_pole=True, pole_distance=distance)

    gamma = lanczos_gamma if backend == "lanczos" else special.gamma
    value = complex(math.pi ** (m * (m - 1) / 4))
    for j in range(m):
        value *= complex(gamma(z - j / 2))
    return GammaEvalResult(value, at_pole=False, pole_distance=distance)


def log_siegel_gamma(m: int, a: ParamLike) -> complex:
    """Sum of principal log-gamma terms plus (m(m-1)/4) log pi."""
    _check_rank(m)
    z = _as_complex(a)
    if siegel_pole_distance(m, z) < POLE_EPS:
        raise PoleError(f"log Gamma_{m}({z}) requested at a pole")
    total = complex(m * (m - 1) / 4 * LOG_PI)
    for j in range(m):
        total += complex(special.loggamma(complex(z - j / 2)))
    return total


def reciprocal_siegel_gamma(m: int, a: ParamLike) -> complex:
    """1/Gamma_m(a), an entire function (exactly 0 on the polar set)."""
    _check_rank(m)
    z = _as_complex(a)
    value = complex(math.pi ** (-m * (m - 1) / 4))
    for j in range(m):
        value *= complex(special.rgamma(complex(z - j / 2)))
    return value


def siegel_gamma_ratio(
    m: int,
    numerator: list[complex],
    denominator: list[complex],
) -> complex:
    """prod Gamma_m(numerator) / prod Gamma_m(denominator) via log-gamma sums.

    Numerator poles raise PoleError; a denominator pole makes the ratio 0.
    """
    if any(siegel_pole_distance(m, b) < POLE_EPS for b in denominator):
        return 0j
    log_value = sum((log_siegel_gamma(m, a) for a in numerator), 0j)
    log_value -= sum((log_siegel_gamma(m, b) for b in denominator), 0j)
    return cmath.exp(log_value)


def stiefel_volume(n: int, m: int) -> float:
    """sigma_{n,m} = 2^m pi^{nm/2} / Gamma_m(n/2), the total mass of dv."""
    if not 1 <= m <= n:
        raise DimensionError(f"Stiefel volume needs 1 <= m <= n, got n={n}, m={m}")
    log_volume = m * math.log(2) + n * m / 2 * LOG_PI
    log_volume -= log_siegel_gamma(m, n / 2).real
    return math.exp(log_volume)


def bernstein_poly(ell: int, m: int, n: int, a: ParamLike) -> complex:
    """B_{ell,m,n}(a) = prod_{i<m} prod_{j<ell} (a - i + 2j)(a - n + 2 + 2j + i)."""
    if ell < 0:
        raise ValueError(f"ell must be non-negative, got {ell}")
    z = _as_complex(a)
    value = 1 + 0j
    for i in range(m):
        for j in range(ell):
            value *= (z - i + 2 * j) * (z - n + 2 + 2 * j + i)
    return value


def funk_const(n: int, m: int, k: int) -> float:
    """c_{k,m} = Gamma_m(n/2) / (Gamma_m(k/2) Gamma_m((n-k)/2))."""
    if not (1 <= m and k < n):
        raise DimensionError(f"Funk constant needs m >= 1 and k < n, got {n=}, {k=}")
    if k < m or n - k < m:
        raise DimensionError(
            f"Funk constant needs k >= m and n - k >= m, got n={n}, m={m}, k={k}"
        )
    return siegel_gamma_ratio(m, [n / 2], [k / 2, (n - k) / 2]).real


def cosine_const(n: int, m: int, k: int, a: ParamLike) -> complex:
    """Transform of f = 1 against the probability measure d_*v.

    Gamma_m(n/2) Gamma_m(a/2) / (Gamma_m(k/2) Gamma_m((a - k + n)/2)); equals 1
    at a = k.
    """
    if not m <= k <= n - 1:
        raise DimensionError(f"closed form needs m <= k <= n-1, got {n=}, {m=}, {k=}")
    z = _as_complex(a)
    if siegel_pole_distance(m, z / 2) < POLE_EPS:
        raise PoleError(f"Gamma_{m}(a/2) has a pole at a={z}")
    return siegel_gamma_ratio(m, [n / 2, z / 2], [k / 2, (z - k + n) / 2])


def delta_norm(n: int, m: int, a: ParamLike) -> complex:
    """Normalising factor of M^a.

    (Gamma_m(m/2)/Gamma_m(n/2)) * Gamma_m((m - a)/2) / Gamma_m(a/2), defined
    for a outside {1, 2, ...}.
    """
    if not 1 <= m <= n:
        raise DimensionError(f"normalisation needs 1 <= m <= n, got n={n}, m={m}")
    z = _as_complex(a)
    nearest = round(z.real)
    if nearest >= 1 and abs(z - nearest) < POLE_EPS:
        raise ExcludedParamError(f"a={z} is excluded: a is a positive integer")
    if siegel_pole_distance(m, (m - z) / 2) < POLE_EPS:
        raise ExcludedParamError(
            f"a={z} is excluded: Gamma_{m}((m - a)/2) has a pole there"
        )
    return siegel_gamma_ratio(m, [m / 2, (m - z) / 2], [n / 2, z / 2])


def tilde_delta_norm(n: int, m: int, lam: ParamLike) -> complex:
    """Normalising factor in lambda-notation, equal to delta_norm at lam + m - n/2."""
    z = _as_complex(lam)
    try:
        return delta_norm(n, m, z + m - n / 2)
    except ExcludedParamError as e:
        raise ExcludedParamError(
            f"lambda={z} is excluded: lambda + m - n/2 hits a pole"
        ) from e


def multiplier_c(j: int, lam: ParamLike, n: int) -> complex:
    """Eigenvalue of the normalised rank-one Cos^lam transform on degree j.

    (-1)^{j/2} Gamma((j + rho - lam)/2) / Gamma((j + rho + lam)/2) for even j,
    exactly 0 for odd j; rho = n/2.
    """
    if j < 0:
        raise ValueError(f"degree must be non-negative, got {j}")
    if j % 2 == 1:
        return 0j
    z = _as_complex(lam)
    rho = n / 2
    top = (j + rho - z) / 2
    bottom = (j + rho + z) / 2
    if gamma_pole_distance(top) < POLE_EPS:
        raise PoleError(f"Gamma((j + rho - lam)/2) has a pole at j={j}, lam={z}")
    if gamma_pole_distance(bottom) < POLE_EPS:
        return 0j
    sign = -1 if (j // 2) % 2 else 1
    return sign * cmath.exp(special.loggamma(top) - special.loggamma(bottom))
