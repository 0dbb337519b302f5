"""Zeta integrals on matrix space and the Cayley-Laplace operator.

Z(f, alpha - n) = int f(x) det(x'x)^{(alpha - n)/2} dx over n x m matrices. The
Bernstein identity Delta^ell |x|^{alpha + 2 ell - n} = B_ell(alpha) |x|^{alpha - n}
continues Z below the convergence strip; Delta^ell f is taken in closed form
for the test-function families defined here.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Literal, Protocol

import numpy as np
from numpy.polynomial import Polynomial
from scipy import stats

from stiefel_transforms.errors import (
    BernsteinZeroError,
    ClosedFormUnavailableError,
    ConvergenceDomainError,
    DimensionError,
    RankError,
    StepError,
)
from stiefel_transforms.gamma_toolkit import (
    ParamLike,
    bernstein_poly,
    log_siegel_gamma,
    reciprocal_siegel_gamma,
    siegel_gamma,
    stiefel_volume,
)
from stiefel_transforms.manifold import sample_haar
from stiefel_transforms.models import (
    ComplexParam,
    LimitResult,
    MatrixSpacePoint,
    MCEstimate,
    SeededRng,
)
from stiefel_transforms.montecarlo import (
    DEFAULT_CHUNK_SIZE,
    default_samples,
    estimate_from_values,
    integrate,
    kernel_power,
    sample_values,
)

logger = logging.getLogger(__name__)

FD_STEP = 1e-2
MIN_STEP = 1e-4
MAX_STEP = 1e-1
BERNSTEIN_GUARD = 1e-8
MIN_GRAM_EIGENVALUE = 0.1
LIMIT_ALPHAS = (0.1, 0.05, 0.025)

Sampler = Literal["polar", "gaussian"]
Family = Literal["gaussian", "gaussian_times_poly"]


class TestFunction(Protocol):
    """A function on n x m matrices evaluated on stacks ``(..., n, m)``."""

    n: int
    m: int

    def __call__(self, x: np.ndarray) -> np.ndarray: ...


def _trace_gram(x: np.ndarray) -> np.ndarray:
    return np.einsum("...ij,...ij->...", x, x)


@dataclass(frozen=True)
class SchwartzTestFunction:
    """q(tr x'x) exp(-tr x'x) for a polynomial q with the given coefficients.

    The ``gaussian`` family is q = coefficients[0]; ``gaussian_times_poly`` allows
    any degree. Coefficients are in increasing powers of s = tr(x'x).
    """

    n: int
    m: int
    family: Family = "gaussian"
    coefficients: tuple[float, ...] = (1.0,)

    def __post_init__(self) -> None:
        if not 1 <= self.m <= self.n:
            raise DimensionError(f"need 1 <= m <= n, got n={self.n}, m={self.m}")
        coefficients = tuple(float(c) for c in self.coefficients) or (0.0,)
        if self.family == "gaussian" and len(coefficients) != 1:
            raise ValueError("the gaussian family takes a single scale coefficient")
        object.__setattr__(self, "coefficients", coefficients)

    @classmethod
    def gaussian(cls, n: int, m: int) -> SchwartzTestFunction:
        return cls(n, m)

    @property
    def polynomial(self) -> Polynomial:
        return Polynomial(self.coefficients)

    def at_origin(self) -> float:
        return self.coefficients[0]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        s = _trace_gram(x)
        return self.polynomial(s) * np.exp(-s)


def radial_laplacian(q: Polynomial, n: int) -> Polynomial:
    """Polynomial p with Laplacian(q(|x|^2) e^{-|x|^2}) = p(|x|^2) e^{-|x|^2} in R^n."""
    s = Polynomial([0.0, 1.0])
    dq, ddq = q.deriv(1), q.deriv(2)
    return 4 * s * (ddq - 2 * dq + q) + 2 * n * (dq - q)


@dataclass(frozen=True)
class GaussianCayleyLaplace:
    """Closed form of det(d'd) applied to c exp(-tr x'x) on n x 2 matrices."""

    n: int
    scale: float = 1.0
    m: int = field(default=2, init=False)

    def at_origin(self) -> float:
        # H1(0) = 0, H2(0) = -2
        return self.scale * (4.0 * self.n**2 - 4.0 * self.n)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        first = 2 * x
        second = 4 * x**2 - 2
        s1 = second[..., 0].sum(axis=-1)
        s2 = second[..., 1].sum(axis=-1)
        cross = (first[..., 0] * first[..., 1]).sum(axis=-1)
        diagonal = (first[..., 0] ** 2 * first[..., 1] ** 2).sum(axis=-1)
        same_row = (second[..., 0] * second[..., 1]).sum(axis=-1)
        mixed = cross**2 - diagonal + same_row
        return self.scale * (s1 * s2 - mixed) * np.exp(-_trace_gram(x))


def laplace_image(f: SchwartzTestFunction, ell: int = 1) -> TestFunction:
    """Delta^ell f in closed form.

    Rank one handles any radial polynomial family and any ell; for m = 2 only
    ell = 1 applied to the pure Gaussian is available.
    """
    if ell < 0:
        raise ValueError(f"ell must be non-negative, got {ell}")
    if ell == 0:
        return f
    if f.m == 1:
        q = f.polynomial
        for _ in range(ell):
            q = radial_laplacian(q, f.n)
        return SchwartzTestFunction(
            f.n, 1, "gaussian_times_poly", tuple(q.coef.tolist())
        )
    if f.m == 2 and ell == 1 and len(f.coefficients) == 1:
        return GaussianCayleyLaplace(f.n, f.coefficients[0])
    raise ClosedFormUnavailableError(
        f"no closed-form Delta^{ell} for the {f.family} family with m={f.m}"
    )


@dataclass(frozen=True)
class QuadratureSpec:
    """How a zeta integral is sampled."""

    n_samples: int | None = None
    seed: int = 0
    sampler: Sampler = "polar"
    workers: int = 1
    chunk_size: int = DEFAULT_CHUNK_SIZE

    def samples_for(self, m: int) -> int:
        return self.n_samples or default_samples(m)

    @property
    def rng(self) -> SeededRng:
        return SeededRng(self.seed)


def bartlett_factor(
    uniforms: np.ndarray,
    normals: np.ndarray,
    df: float,
) -> np.ndarray:
    """Lower Cholesky factor of a Wishart(df, I_m) draw.

    Diagonal entries are sqrt(chi2(df - i)) by inverse CDF of ``uniforms`` so that
    draws at different df share their randomness; ``df`` may be any real > m - 1.
    """
    m = uniforms.shape[-1]
    lower = np.tril(normals, -1)
    chi2 = stats.chi2.ppf(uniforms, df - np.arange(m))
    idx = np.arange(m)
    lower[..., idx, idx] = np.sqrt(chi2)
    return lower


@dataclass(frozen=True, eq=False)
class PolarZetaIntegrand:
    """x = v L' with v Haar and LL' Wishart(Re alpha, I_m).

    The Wishart density absorbs det(r)^{(Re alpha - m - 1)/2}; what remains is
    f(x) e^{tr r / 2} det(r)^{i Im alpha / 2}.
    """

    f: TestFunction
    alpha: complex

    def __call__(self, gen: np.random.Generator, size: int) -> np.ndarray:
        n, m = self.f.n, self.f.m
        v = sample_haar(gen, n, m, size)
        uniforms = gen.random((size, m))
        normals = gen.standard_normal((size, m, m))
        lower = bartlett_factor(uniforms, normals, self.alpha.real)
        x = v @ np.swapaxes(lower, -1, -2)
        trace = np.einsum("...ij,...ij->...", lower, lower)
        values = self.f(x) * np.exp(trace / 2)
        if self.alpha.imag:
            diag = np.diagonal(lower, axis1=-2, axis2=-1)
            log_det = 2 * np.log(diag).sum(axis=-1)
            values = values * np.exp(0.5j * self.alpha.imag * log_det)
        return values.astype(complex)


@dataclass(frozen=True, eq=False)
class GaussianZetaIntegrand:
    """Standard Gaussian x reweighted by e^{tr x'x / 2} (constant applied later)."""

    f: TestFunction
    alpha: complex

    def __call__(self, gen: np.random.Generator, size: int) -> np.ndarray:
        x = gen.standard_normal((size, self.f.n, self.f.m))
        gram = np.swapaxes(x, -1, -2) @ x
        det = np.linalg.det(gram)
        weight = np.exp(_trace_gram(x) / 2)
        return self.f(x) * weight * kernel_power(det, (self.alpha - self.f.n) / 2)


def _polar_log_weight(n: int, m: int, df: float) -> float:
    log_weight = -m * math.log(2) + math.log(stiefel_volume(n, m))
    log_weight += m * df / 2 * math.log(2) + log_siegel_gamma(m, df / 2).real
    return log_weight


def _zeta_setup(
    f: TestFunction,
    alpha: complex,
    quadrature: QuadratureSpec,
) -> tuple[PolarZetaIntegrand | GaussianZetaIntegrand, float]:
    if alpha.real <= f.m - 1:
        raise ConvergenceDomainError(
            f"zeta integral needs Re alpha > m - 1 = {f.m - 1}, got {alpha}"
        )
    if quadrature.sampler == "gaussian":
        log_weight = f.n * f.m / 2 * math.log(2 * math.pi)
        return GaussianZetaIntegrand(f, alpha), math.exp(log_weight)
    return PolarZetaIntegrand(f, alpha), math.exp(
        _polar_log_weight(f.n, f.m, alpha.real)
    )


def zeta_integral(
    f: TestFunction,
    alpha: ParamLike,
    quadrature: QuadratureSpec | None = None,
) -> MCEstimate:
    """Monte Carlo value of Z(f, alpha - n) for Re alpha > m - 1.

    Args:
        f: Test function on n x m matrices (dimensions are taken from it).
        alpha: Complex parameter.
        quadrature: Sample count, seed and sampler; the default ``polar``
            sampler has finite variance across the whole strip.

    Returns:
        MCEstimate of the integral.
    """
    quadrature = quadrature or QuadratureSpec()
    a = ComplexParam.coerce(alpha).value
    integrand, weight = _zeta_setup(f, a, quadrature)
    logger.debug("Zeta integral at alpha=%s with the %s sampler", a, quadrature.sampler)
    estimate = integrate(
        integrand,
        quadrature.samples_for(f.m),
        quadrature.rng,
        chunk_size=quadrature.chunk_size,
        workers=quadrature.workers,
    )
    return estimate.scaled(weight)


def gaussian_zeta_closed_form(n: int, m: int, alpha: ParamLike) -> complex:
    """Z(exp(-tr x'x), alpha - n) = 2^{-m} sigma_{n,m} Gamma_m(alpha/2)."""
    a = ComplexParam.coerce(alpha).value
    return 2.0**-m * stiefel_volume(n, m) * siegel_gamma(m, a / 2).value


def _check_step(step: float) -> None:
    if not MIN_STEP <= step <= MAX_STEP:
        raise StepError(f"step {step} outside [{MIN_STEP}, {MAX_STEP}]")


# One-dimensional central stencils as (shift, weight); weights exclude 1/h^order.
_STENCILS: dict[tuple[int, int], tuple[tuple[int, float], ...]] = {
    (1, 2): ((-1, -0.5), (1, 0.5)),
    (2, 2): ((-1, 1.0), (0, -2.0), (1, 1.0)),
    (1, 4): ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12)),
    (2, 4): ((-2, -1 / 12), (-1, 16 / 12), (0, -30 / 12), (1, 16 / 12), (2, -1 / 12)),
}


def _product_stencil(
    shape: tuple[int, int],
    factors: list[tuple[tuple[int, int], int]],
    step: float,
    accuracy: int,
) -> tuple[list[np.ndarray], list[float]]:
    """Offsets and weights of prod_a d^{order_a}/dx_a over distinct entries a."""
    total_order = sum(order for _, order in factors)
    offsets, weights = [], []
    stencils = [_STENCILS[(order, accuracy)] for _, order in factors]
    for combo in itertools.product(*stencils):
        offset = np.zeros(shape)
        weight = 1.0
        for (entry, _), (shift, coef) in zip(factors, combo, strict=True):
            offset[entry] += shift * step
            weight *= coef
        offsets.append(offset)
        weights.append(weight / step**total_order)
    return offsets, weights


def _cayley_laplace_stencil(
    n: int,
    m: int,
    step: float,
    accuracy: int,
) -> tuple[np.ndarray, np.ndarray]:
    offsets: list[np.ndarray] = []
    weights: list[float] = []

    def add(factors: list[tuple[tuple[int, int], int]], sign: float) -> None:
        o, w = _product_stencil((n, m), factors, step, accuracy)
        offsets.extend(o)
        weights.extend(sign * wi for wi in w)

    if m == 1:
        for i in range(n):
            add([((i, 0), 2)], 1.0)
    else:
        # det(d'd) = D11 D22 - D12^2 with D_ab = sum_i d_ia d_ib
        for i, i2 in itertools.product(range(n), repeat=2):
            add([((i, 0), 2), ((i2, 1), 2)], 1.0)
            if i == i2:
                add([((i, 0), 2), ((i, 1), 2)], -1.0)
            else:
                add([((i, 0), 1), ((i, 1), 1), ((i2, 0), 1), ((i2, 1), 1)], -1.0)
    return np.array(offsets), np.array(weights)


def cayley_laplace(
    f: Callable[[np.ndarray], np.ndarray],
    x: MatrixSpacePoint,
    step: float = FD_STEP,
    *,
    accuracy: Literal[2, 4] = 4,
) -> complex:
    """det(d'd) f at x by central finite differences.

    m = 1 is the ordinary Laplacian; m = 2 expands det(d'd) into products of
    derivatives in distinct entries, each a tensor product of 1-D stencils.

    Args:
        f: Callable on stacked n x m matrices.
        x: Evaluation point.
        step: Finite-difference step in [1e-4, 1e-1].
        accuracy: Order of the one-dimensional stencils.
    """
    _check_step(step)
    if x.m > 2:
        raise DimensionError(
            f"finite-difference Cayley-Laplace needs m <= 2, got {x.m}"
        )
    offsets, weights = _cayley_laplace_stencil(x.n, x.m, step, accuracy)
    values = np.asarray(f(x.entries + offsets))
    return complex(np.dot(weights, values))


def cayley_laplace_closed_form(f: SchwartzTestFunction, x: MatrixSpacePoint) -> float:
    """Delta f at x from :func:`laplace_image`."""
    return float(laplace_image(f, 1)(x.entries))


@dataclass(frozen=True)
class DetPower:
    """det(x'x)^{exponent/2}, i.e. |x|_m^exponent."""

    exponent: complex

    def __call__(self, x: np.ndarray) -> np.ndarray:
        det = np.linalg.det(np.swapaxes(x, -1, -2) @ x)
        return kernel_power(det, self.exponent / 2)


def _check_point(x: MatrixSpacePoint) -> float:
    gram = x.entries.T @ x.entries
    smallest = float(np.min(np.linalg.eigvalsh(gram)))
    if smallest < MIN_GRAM_EIGENVALUE:
        raise RankError(
            f"x'x has smallest eigenvalue {smallest:.3e} < {MIN_GRAM_EIGENVALUE}"
        )
    return float(np.linalg.det(gram))


def bernstein_identity_residual(
    alpha: ParamLike,
    ell: int,
    m: int,
    n: int,
    x: MatrixSpacePoint,
    step: float = FD_STEP,
) -> float:
    """Residual of Delta |x|^{alpha + 2 - n} = B_1(alpha) |x|^{alpha - n}, by stencil.

    Relative to |B_1(alpha)| |x|^{alpha - n}, or absolute when that is below
    BERNSTEIN_GUARD (the harmonic case B_1(alpha) = 0).
    """
    if ell != 1:
        raise ValueError(f"finite differences support ell = 1 only, got {ell}")
    if (x.n, x.m) != (n, m):
        raise DimensionError(f"x has shape {(x.n, x.m)}, expected {(n, m)}")
    _check_step(step)
    a = ComplexParam.coerce(alpha).value
    det = _check_point(x)
    lhs = cayley_laplace(DetPower(a + 2 - n), x, step)
    rhs = bernstein_poly(1, m, n, a) * det ** ((a - n) / 2)
    if abs(rhs) < BERNSTEIN_GUARD:
        return abs(lhs - rhs)
    return abs(lhs - rhs) / abs(rhs)


def _check_bernstein(ell: int, m: int, n: int, a: complex) -> complex:
    b = bernstein_poly(ell, m, n, a)
    if abs(b) < BERNSTEIN_GUARD:
        raise BernsteinZeroError(f"B_{ell}({a}) = {b} vanishes for n={n}, m={m}")
    return b


def bernstein_continuation(
    f: SchwartzTestFunction,
    alpha: ParamLike,
    ell: int,
    quadrature: QuadratureSpec | None = None,
) -> MCEstimate:
    """Z(f, alpha - n) continued as Z(Delta^ell f, alpha + 2 ell - n) / B_ell(alpha).

    Valid for Re alpha > m - 1 - 2 ell away from the zeros of B_ell.
    """
    a = ComplexParam.coerce(alpha).value
    if a.real <= f.m - 1 - 2 * ell:
        raise ConvergenceDomainError(
            f"continuation with ell={ell} needs Re alpha > {f.m - 1 - 2 * ell}, got {a}"
        )
    b = _check_bernstein(ell, f.m, f.n, a)
    image = laplace_image(f, ell)
    return zeta_integral(image, a + 2 * ell, quadrature).scaled(1 / b)


def zeta_limit(
    f: SchwartzTestFunction,
    quadrature: QuadratureSpec | None = None,
    alphas: tuple[float, float, float] = LIMIT_ALPHAS,
) -> LimitResult:
    """Extrapolate Z(Delta f, alpha + 2 - n) / (B_1(alpha) Gamma_m(alpha/2)) to 0.

    The three alphas must halve successively. Values at each alpha come from
    the same draws, and the two-level Richardson combination is applied per
    sample before averaging. The limit equals pi^{nm/2}/Gamma_m(n/2) f(0).
    """
    quadrature = quadrature or QuadratureSpec()
    h0, h1, h2 = alphas
    if not (math.isclose(h1, h0 / 2) and math.isclose(h2, h1 / 2)):
        raise ValueError(f"alphas must halve successively, got {alphas}")
    image = laplace_image(f, 1)
    levels = []
    for a in alphas:
        b = _check_bernstein(1, f.m, f.n, a)
        integrand, weight = _zeta_setup(image, complex(a + 2), quadrature)
        values = sample_values(
            integrand,
            quadrature.samples_for(f.m),
            quadrature.rng,
            chunk_size=quadrature.chunk_size,
        )
        factor = weight * reciprocal_siegel_gamma(f.m, a / 2) / b
        logger.debug("Limit level alpha=%s uses factor %s", a, factor)
        levels.append(values * factor)
    g0, g1, g2 = levels
    r0 = 2 * g1 - g0
    r1 = 2 * g2 - g1
    extrapolated = (4 * r1 - r0) / 3
    estimate = estimate_from_values(extrapolated)
    reference = (
        math.exp(
            f.n * f.m / 2 * math.log(math.pi)
            - log_siegel_gamma(f.m, f.n / 2).real
        )
        * f.at_origin()
    )
    return LimitResult(estimate=estimate, reference=reference)
