"""The rank-one Cos^lambda transform on the sphere S^{n-1}.

Cos^lambda acts diagonally on spherical harmonics; on zonal harmonics
C_j^{(n-2)/2}(v . e) its eigenvalue is the multiplier c_{j,lambda}. Every
empirical multiplier is a ratio (transform over function at one point), so
none of it depends on how the harmonics are normalised.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from stiefel_transforms.errors import (
    ConvergenceDomainError,
    DimensionError,
    ExcludedParamError,
    QuadratureDegreeError,
)
from stiefel_transforms.functions import ManifoldFunction
from stiefel_transforms.gamma_toolkit import (
    POLE_EPS,
    ParamLike,
    funk_const,
    multiplier_c,
    tilde_delta_norm,
)
from stiefel_transforms.models import (
    ComplexParam,
    Frame,
    MCEstimate,
    MultiplierReport,
    MultiplierRow,
    SeededRng,
)
from stiefel_transforms.montecarlo import DEFAULT_SCALAR_SAMPLES
from stiefel_transforms.transforms import M_normalized, funk_transform

logger = logging.getLogger(__name__)

QUADRATURE_NODES = 256
N_SIGMA = 4.0
ZERO_VARIANCE_TOL = 1e-12
COMPOSITION_TOL = 1e-10
DECAY_TOL = 0.05
DECAY_MIN_JMAX = 400


def _order(n: int) -> float:
    if n < 3:
        raise DimensionError(f"zonal harmonics need n >= 3, got n={n}")
    return (n - 2) / 2


def gegenbauer(j: int, order: float, t: float | np.ndarray) -> float | np.ndarray:
    """C_j^order(t) by the three-term recurrence.

    C_0 = 1, C_1 = 2 order t and
    (k + 1) C_{k+1} = 2 t (k + order) C_k - (k + 2 order - 1) C_{k-1}.
    """
    if j < 0:
        raise ValueError(f"degree must be non-negative, got {j}")
    if order <= -0.5:
        raise ValueError(f"Gegenbauer order must exceed -1/2, got {order}")
    t = np.asarray(t, dtype=float)
    prev = np.ones_like(t)
    if j == 0:
        return prev if prev.ndim else float(prev)
    cur = 2 * order * t
    for k in range(1, j):
        nxt = 2 * t * (k + order) * cur - (k + 2 * order - 1) * prev
        prev, cur = cur, nxt / (k + 1)
    return cur if cur.ndim else float(cur)


def gegenbauer_norm(j: int, order: float) -> float:
    """int_{-1}^1 C_j(t)^2 (1 - t^2)^{order - 1/2} dt."""
    log_norm = (
        math.log(math.pi)
        + (1 - 2 * order) * math.log(2)
        + math.lgamma(j + 2 * order)
        - math.lgamma(j + 1)
        - math.log(j + order)
        - 2 * math.lgamma(order)
    )
    return math.exp(log_norm)


@dataclass(frozen=True, eq=False)
class ZonalFunction:
    """v -> C_j^{(n-2)/2}(v . axis) on S^{n-1}, a degree-j spherical harmonic."""

    n: int
    degree: int
    axis: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        _order(self.n)
        if self.axis is None:
            axis = np.zeros(self.n)
            axis[-1] = 1.0
        else:
            axis = np.asarray(self.axis, dtype=float).reshape(-1)
            if axis.size != self.n or not math.isclose(np.linalg.norm(axis), 1.0):
                raise DimensionError(f"axis must be a unit vector in R^{self.n}")
        object.__setattr__(self, "axis", axis)

    @property
    def order(self) -> float:
        return _order(self.n)

    def profile(self, t: float | np.ndarray) -> float | np.ndarray:
        return gegenbauer(self.degree, self.order, t)

    def __call__(self, v: np.ndarray) -> np.ndarray:
        return self.profile(v[..., :, 0] @ self.axis)

    @property
    def axis_frame(self) -> Frame:
        return Frame(self.axis[:, None])

    def as_function(self) -> ManifoldFunction:
        # f(-v) = (-1)^j f(v), so only even degrees are O(1)-invariant.
        return ManifoldFunction(
            self.n,
            1,
            self,
            right_o_invariant=self.degree % 2 == 0,
            name=f"zonal:{self.degree}",
        )


def zonal_eigen_residual(zonal: ZonalFunction, step: float = 1e-3) -> float:
    """Max |(1-t^2) g'' - (n-1) t g' + j(j+n-2) g| on interior nodes of [-1, 1].

    Zero for a zonal harmonic: the Laplace-Beltrami operator of S^{n-1} acts on
    g(v . e) through this ordinary differential operator.
    """
    t = np.linspace(-0.9, 0.9, 19)
    g = zonal.profile
    d1 = (g(t + step) - g(t - step)) / (2 * step)
    d2 = (g(t + step) - 2 * g(t) + g(t - step)) / step**2
    j, n = zonal.degree, zonal.n
    residual = (1 - t**2) * d2 - (n - 1) * t * d1 + j * (j + n - 2) * g(t)
    return float(np.max(np.abs(residual)))


@dataclass(frozen=True, eq=False)
class HarmonicExpansion:
    """Zonal Fourier-Laplace coefficients: f(t) = sum_j coefficients[j] C_j(t)."""

    n: int
    coefficients: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def reconstruct(self, t: float | np.ndarray) -> float | np.ndarray:
        order = _order(self.n)
        total = np.zeros_like(np.asarray(t, dtype=float))
        for j, coef in enumerate(self.coefficients):
            total = total + coef * gegenbauer(j, order, t)
        return total


def expand_zonal(
    profile: Callable[[np.ndarray], np.ndarray],
    n: int,
    max_degree: int,
    n_nodes: int = QUADRATURE_NODES,
) -> tuple[HarmonicExpansion, float]:
    """Gegenbauer coefficients of a zonal function given by its profile g(t).

    Gauss-Gegenbauer nodes integrate exactly against (1 - t^2)^{(n-3)/2}.

    Returns:
        The expansion and the quadrature L^2 reconstruction error.
    """
    if max_degree < 0:
        raise ValueError(f"max_degree must be non-negative, got {max_degree}")
    if n_nodes < 2 * max_degree + 1:
        raise QuadratureDegreeError(
            f"{n_nodes} nodes cannot resolve degree {max_degree}; "
            f"need at least {2 * max_degree + 1}"
        )
    order = _order(n)
    nodes, weights = special.roots_gegenbauer(n_nodes, order)
    values = np.asarray(profile(nodes), dtype=float)
    coefficients = np.array(
        [
            np.sum(weights * values * gegenbauer(j, order, nodes))
            / gegenbauer_norm(j, order)
            for j in range(max_degree + 1)
        ]
    )
    expansion = HarmonicExpansion(n, coefficients)
    error = math.sqrt(np.sum(weights * (values - expansion.reconstruct(nodes)) ** 2))
    return expansion, error


def rank_one_alpha(lam: ParamLike, n: int) -> complex:
    """alpha = lambda + 1 - rho: Cos^lambda is M^alpha with m = 1."""
    return ComplexParam.coerce(lam).value + 1 - n / 2


def unnormalized_multiplier(j: int, lam: ParamLike, n: int) -> complex:
    """Eigenvalue of int f(v) |u . v|^{lambda - rho} d_*v on degree j."""
    return multiplier_c(j, lam, n) / tilde_delta_norm(n, 1, lam)


def cos_lambda_transform(
    f: ManifoldFunction,
    u: Frame,
    lam: ParamLike,
    n_samples: int,
    rng: SeededRng,
    **kwargs,
) -> MCEstimate:
    """Normalised Cos^lambda f at u, for Re lambda > rho - 1."""
    if f.m != 1:
        raise DimensionError(f"Cos^lambda acts on the sphere (m = 1), got m={f.m}")
    z = ComplexParam.coerce(lam).value
    rho = f.n / 2
    if z.real <= rho - 1:
        raise ConvergenceDomainError(
            f"Cos^lambda needs Re lambda > rho - 1 = {rho - 1}, got {z}"
        )
    alpha = rank_one_alpha(z, f.n)
    return M_normalized(f, u, alpha, n_samples, rng, **kwargs)


def cos_lambda_multiplier_mc(
    j: int,
    lam: ParamLike,
    n: int,
    n_samples: int = DEFAULT_SCALAR_SAMPLES,
    rng: SeededRng | None = None,
    *,
    point: Frame | None = None,
    workers: int = 1,
) -> MCEstimate:
    """Empirical c_{j,lambda}: (Cos^lambda Y_j)(u) / Y_j(u).

    ``point`` defaults to the axis of the zonal harmonic, where Y_j is largest.
    """
    zonal = ZonalFunction(n, j)
    u = point or zonal.axis_frame
    at_point = float(zonal(u.entries))
    if abs(at_point) < POLE_EPS:
        raise ValueError(f"Y_{j} vanishes at the evaluation point")
    estimate = cos_lambda_transform(
        zonal.as_function(), u, lam, n_samples, rng or SeededRng(0), workers=workers
    )
    return estimate.scaled(1 / at_point)


def _passes(estimate: MCEstimate, reference: complex) -> bool:
    diff = abs(estimate.value - reference)
    return bool(diff <= max(N_SIGMA * estimate.stderr, ZERO_VARIANCE_TOL))


def multiplier_table(
    degrees: Sequence[int],
    lams: Sequence[ParamLike],
    n: int,
    n_samples: int,
    rng: SeededRng,
    *,
    workers: int = 1,
) -> MultiplierReport:
    """Empirical against formula multipliers over a (degree, lambda) grid."""
    rows = []
    grid = [(j, lam) for lam in lams for j in degrees]
    for index, (j, lam) in enumerate(grid):
        z = ComplexParam.coerce(lam).value
        formula = multiplier_c(j, z, n)
        estimate = cos_lambda_multiplier_mc(
            j, z, n, n_samples, rng.child(index), workers=workers
        )
        rows.append(
            MultiplierRow(
                j=j,
                lam=z,
                formula=formula,
                value=estimate.value,
                stderr=estimate.stderr,
                passed=_passes(estimate, formula),
            )
        )
    worst = max(
        (abs(r.value - r.formula) / max(r.stderr, ZERO_VARIANCE_TOL) for r in rows),
        default=0.0,
    )
    return MultiplierReport(
        check="multiplier",
        n=n,
        rows=rows,
        statistic=float(worst),
        passed=all(r.passed for r in rows),
    )


def _check_excluded(lam: complex, n: int) -> None:
    rho = n / 2
    for sign in (1, -1):
        z = sign * lam + 1 - rho
        nearest = round(z.real)
        if nearest >= 1 and abs(z - nearest) < POLE_EPS:
            raise ExcludedParamError(
                f"lambda={lam} is excluded: {sign:+d} lambda + 1 - rho = {nearest}"
            )


def composition_identity_check(
    j_max: int,
    lam_grid: Sequence[ParamLike],
    n: int = 3,
) -> MultiplierReport:
    """max |c_{j,lambda} c_{j,-lambda} - 1| over even j <= j_max.

    Odd degrees are annihilated (c_{j,lambda} = 0), so Cos^{-lambda} Cos^lambda
    is the identity on even functions only.
    """
    lams = [ComplexParam.coerce(lam).value for lam in lam_grid]
    for lam in lams:
        _check_excluded(lam, n)
    rows = []
    for lam in lams:
        for j in range(0, j_max + 1, 2):
            product = multiplier_c(j, lam, n) * multiplier_c(j, -lam, n)
            rows.append(
                MultiplierRow(
                    j=j,
                    lam=lam,
                    formula=1 + 0j,
                    value=product,
                    passed=bool(abs(product - 1) < COMPOSITION_TOL),
                )
            )
    deviation = max((abs(r.value - 1) for r in rows), default=0.0)
    return MultiplierReport(
        check="compose",
        n=n,
        rows=rows,
        statistic=float(deviation),
        passed=bool(deviation < COMPOSITION_TOL),
        notes=["odd degrees are annihilated: c_{j,lambda} = 0 for odd j"],
    )


def funk_limit_multiplier(j: int, n: int) -> float:
    """Unnormalised multiplier over Gamma((lambda + 1 - rho)/2), at lambda = rho - 1.

    The pole of Gamma((lambda + 1 - rho)/2) cancels against the normalising
    factor, leaving (-1)^{j/2} Gamma(rho) Gamma((j+1)/2) / (pi Gamma((j+n-1)/2)).
    """
    _order(n)
    if j % 2:
        return 0.0
    sign = -1.0 if (j // 2) % 2 else 1.0
    log_value = (
        math.lgamma(n / 2)
        + math.lgamma((j + 1) / 2)
        - math.log(math.pi)
        - math.lgamma((j + n - 1) / 2)
    )
    return sign * math.exp(log_value)


def funk_multiplier_mc(
    j: int,
    n: int,
    n_samples: int,
    rng: SeededRng,
    *,
    point: Frame | None = None,
) -> MCEstimate:
    """Empirical Funk multiplier (F Y_j)(u) / Y_j(u).

    At the axis every fiber point sits on the equator, so the estimate is exact
    (C_j(0)/C_j(1)) with zero variance.
    """
    zonal = ZonalFunction(n, j)
    u = point or zonal.axis_frame
    at_point = float(zonal(u.entries))
    if abs(at_point) < POLE_EPS:
        raise ValueError(f"Y_{j} vanishes at the evaluation point")
    return funk_transform(zonal.as_function(), u, n_samples, rng).scaled(1 / at_point)


def funk_multiplier_check(
    j: int,
    n: int,
    n_samples: int,
    rng: SeededRng,
    *,
    point: Frame | None = None,
) -> MultiplierReport:
    """Pole-cancelled Cos^lambda limit at lambda = rho - 1 against c_{1,1} x Funk."""
    if j % 2:
        raise ValueError(f"the Funk limit is compared on even degrees, got j={j}")
    c11 = funk_const(n, 1, 1)
    empirical = funk_multiplier_mc(j, n, n_samples, rng, point=point).scaled(c11)
    formula = funk_limit_multiplier(j, n)
    row = MultiplierRow(
        j=j,
        lam=complex(n / 2 - 1),
        formula=formula,
        value=empirical.value,
        stderr=empirical.stderr,
        passed=_passes(empirical, formula),
    )
    logger.debug("Funk limit j=%d: formula %s, empirical %s", j, formula, empirical)
    return MultiplierReport(
        check="funk",
        n=n,
        rows=[row],
        statistic=float(abs(row.value - formula)),
        passed=row.passed,
    )


def multiplier_decay_check(
    lam: ParamLike,
    j_max: int,
    n: int = 3,
) -> MultiplierReport:
    """Slope of log|c_{j,lambda}| against log j over even j in [j_max/2, j_max].

    The slope tends to -Re lambda; the check passes within DECAY_TOL once
    j_max >= DECAY_MIN_JMAX.
    """
    z = ComplexParam.coerce(lam).value
    start = max(2, j_max // 2 + (j_max // 2) % 2)
    degrees = np.arange(start, j_max + 1, 2)
    if degrees.size < 2:
        raise ValueError(f"j_max={j_max} leaves fewer than two even degrees to fit")
    values = np.array([multiplier_c(int(j), z, n) for j in degrees])
    slope, _ = np.polyfit(np.log(degrees), np.log(np.abs(values)), 1)
    rows = [
        MultiplierRow(j=int(j), lam=z, formula=complex(abs(c)), value=c)
        for j, c in zip(degrees, values, strict=True)
    ]
    passed = abs(slope + z.real) < DECAY_TOL
    if j_max < DECAY_MIN_JMAX:
        logger.info(
            "j_max=%d is below %d; the fitted slope is pre-asymptotic",
            j_max,
            DECAY_MIN_JMAX,
        )
    return MultiplierReport(
        check="decay",
        n=n,
        rows=rows,
        statistic=float(slope),
        passed=bool(passed),
    )
