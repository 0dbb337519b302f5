"""Monte Carlo evaluation of the cosine, sine and Funk transform families.

Every transform is an average over Haar-distributed frames of f times a power of
a Gram determinant. The integrands below are frozen dataclasses so they can be
shipped to worker processes by :func:`stiefel_transforms.montecarlo.integrate`.
Identity residuals that are pointwise in the integrand are evaluated on shared
samples, which turns them into algebraic checks.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from stiefel_transforms.errors import ConvergenceDomainError, DimensionError
from stiefel_transforms.functions import ManifoldFunction
from stiefel_transforms.gamma_toolkit import (
    ParamLike,
    delta_norm,
    log_siegel_gamma,
    reciprocal_siegel_gamma,
    siegel_gamma_ratio,
)
from stiefel_transforms.manifold import (
    complement,
    gram_det_cos,
    gram_det_sin,
    rotation_from_frame,
    sample_haar,
)
from stiefel_transforms.models import (
    ComplexParam,
    Frame,
    MCEstimate,
    Residual,
    SeededRng,
    TransformRequest,
)
from stiefel_transforms.montecarlo import (
    DEFAULT_CHUNK_SIZE,
    estimate_from_values,
    integrate,
    kernel_power,
    sample_values,
)
from stiefel_transforms.zeta import bartlett_factor

logger = logging.getLogger(__name__)

PATHWISE_TOL = 1e-10

KernelKind = Literal["cos", "sin"]


def _alpha(alpha: ParamLike) -> complex:
    return ComplexParam.coerce(alpha).value


def finite_variance(alpha: ParamLike, m: int, k: int) -> bool:
    """Whether the cosine kernel with these parameters has a finite second moment.

    det(v'uu'v) is matrix-Beta(k/2, (n-k)/2) distributed, so the squared kernel
    is integrable iff Re alpha > k/2 + (m-1)/2. Apply with n - k for sine kernels.
    """
    return _alpha(alpha).real > k / 2 + (m - 1) / 2


def check_strip(alpha: complex, m: int, label: str = "alpha") -> None:
    """Absolute convergence needs Re alpha > m - 1."""
    if alpha.real <= m - 1:
        raise ConvergenceDomainError(
            f"Re {label} = {alpha.real} must exceed m - 1 = {m - 1} "
            "for the integral to converge"
        )


def _check_ambient(f: ManifoldFunction, frame: Frame) -> None:
    if frame.n != f.n:
        raise DimensionError(f"frame lives in R^{frame.n} but f on V_{{{f.n},{f.m}}}")


def _degenerate(n_samples: int) -> MCEstimate:
    return MCEstimate(0j, 0.0, n_samples, degenerate=True)


@dataclass(frozen=True, eq=False)
class KernelIntegrand:
    """f(w) * kernel^exponent for Haar draws w of the function's frame size.

    With ``anchor_is_u`` the fixed frame plays u in det(v'uu'v) (direct
    transforms); otherwise the draws play u (dual transforms).
    """

    f: ManifoldFunction
    anchor: np.ndarray
    exponent: complex
    kernel: KernelKind
    anchor_is_u: bool = True

    def kernel_values(self, w: np.ndarray) -> np.ndarray:
        gram = gram_det_cos if self.kernel == "cos" else gram_det_sin
        if self.anchor_is_u:
            det = gram(self.anchor, w)
        else:
            det = gram(w, self.anchor)
        return kernel_power(det, self.exponent)

    def __call__(self, gen: np.random.Generator, size: int) -> np.ndarray:
        w = sample_haar(gen, self.f.n, self.f.m, size)
        return self.f.evaluate_batch(w) * self.kernel_values(w)


@dataclass(frozen=True, eq=False)
class FiberIntegrand:
    """f(basis @ omega) for Haar omega in V_{n-k,m}: the Funk fiber average."""

    f: ManifoldFunction
    basis: np.ndarray

    def __call__(self, gen: np.random.Generator, size: int) -> np.ndarray:
        omega = sample_haar(gen, self.basis.shape[-1], self.f.m, size)
        return self.f.evaluate_batch(self.basis @ omega).astype(complex)


def _kernel_transform(
    f: ManifoldFunction,
    anchor: Frame,
    exponent: complex,
    kernel: KernelKind,
    anchor_is_u: bool,
    n_samples: int,
    rng: SeededRng,
    workers: int,
    chunk_size: int,
) -> MCEstimate:
    integrand = KernelIntegrand(f, anchor.entries, exponent, kernel, anchor_is_u)
    return integrate(
        integrand, n_samples, rng, workers=workers, chunk_size=chunk_size
    )


def cosine_transform(
    f: ManifoldFunction,
    u: Frame,
    alpha: ParamLike,
    n_samples: int,
    rng: SeededRng,
    *,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> MCEstimate:
    """(C^alpha_{m,k} f)(u) = int f(v) det(v'uu'v)^{(alpha-k)/2} d_*v.

    Args:
        f: Function on V_{n,m}.
        u: Frame in V_{n,k}.
        alpha: Complex parameter with Re alpha > m - 1.
        n_samples: Monte Carlo draws.
        rng: Seeded stream.

    Returns:
        MCEstimate; flagged ``degenerate`` with value 0 when m > k.
    """
    _check_ambient(f, u)
    a = _alpha(alpha)
    if f.m > u.m:
        return _degenerate(n_samples)
    check_strip(a, f.m)
    return _kernel_transform(
        f, u, (a - u.m) / 2, "cos", True, n_samples, rng, workers, chunk_size
    )


@dataclass(frozen=True, eq=False)
class TiltedCosineIntegrand:
    """Cosine kernel with the span-u Gram factor drawn from Wishart(Re alpha).

    x = g_u [G2; G1] with G2 Gaussian and G1 = U1 L', U1 Haar on V_{k,m} and LL'
    Wishart(Re alpha, I_m). The tilt absorbs det(G1'G1)^{Re s}, s = (alpha-k)/2,
    so what remains is det(x'x)^{-s} det(G1'G1)^{i Im s}, which has every moment
    for Re alpha <= k.
    """

    f: ManifoldFunction
    rotation: np.ndarray
    k: int
    alpha: complex

    def __call__(self, gen: np.random.Generator, size: int) -> np.ndarray:
        n, m, k = self.f.n, self.f.m, self.k
        outer = gen.standard_normal((size, n - k, m))
        u1 = sample_haar(gen, k, m, size)
        uniforms = gen.random((size, m))
        normals = gen.standard_normal((size, m, m))
        lower = bartlett_factor(uniforms, normals, self.alpha.real)
        inner = u1 @ np.swapaxes(lower, -1, -2)
        x = self.rotation @ np.concatenate([outer, inner], axis=-2)

        chol = np.linalg.cholesky(np.swapaxes(x, -1, -2) @ x)
        v = np.swapaxes(np.linalg.solve(chol, np.swapaxes(x, -1, -2)), -1, -2)
        log_gram = 2 * np.log(np.diagonal(chol, axis1=-2, axis2=-1)).sum(axis=-1)
        s = (self.alpha - k) / 2
        weight = np.exp(-s * log_gram)
        if s.imag:
            diag = np.diagonal(lower, axis1=-2, axis2=-1)
            log_inner = 2 * np.log(diag).sum(axis=-1)
            weight = weight * np.exp(1j * s.imag * log_inner)
        return self.f.evaluate_batch(v) * weight


def tilted_cosine_transform(
    f: ManifoldFunction,
    u: Frame,
    alpha: ParamLike,
    n_samples: int,
    rng: SeededRng,
    *,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> MCEstimate:
    """Same integral as :func:`cosine_transform`, importance sampled.

    Finite variance for m - 1 < Re alpha < n + k - m + 1, which contains the
    heavy-tailed band Re alpha <= k/2 + (m-1)/2 where the plain estimator's
    second moment diverges.
    """
    _check_ambient(f, u)
    a = _alpha(alpha)
    if f.m > u.m:
        return _degenerate(n_samples)
    check_strip(a, f.m)
    m, k = f.m, u.m
    # E det(G1'G1)^{Re s} for Gaussian G1, with k/2 + Re s = Re alpha / 2
    log_tilt = m * math.log(2) * (a.real - k) / 2
    log_tilt += (log_siegel_gamma(m, a.real / 2) - log_siegel_gamma(m, k / 2)).real
    # a full frame is its own g_u
    rotation = u.entries if k == f.n else rotation_from_frame(u).entries
    integrand = TiltedCosineIntegrand(f, rotation, k, a)
    estimate = integrate(
        integrand, n_samples, rng, workers=workers, chunk_size=chunk_size
    )
    return estimate.scaled(math.exp(log_tilt))


def dual_cosine_transform(
    phi: ManifoldFunction,
    v: Frame,
    alpha: ParamLike,
    n_samples: int,
    rng: SeededRng,
    *,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> MCEstimate:
    """int phi(u) det(v'uu'v)^{(alpha-k)/2} d_*u for phi on V_{n,k}, v in V_{n,m}."""
    _check_ambient(phi, v)
    a = _alpha(alpha)
    if v.m > phi.m:
        return _degenerate(n_samples)
    check_strip(a, v.m)
    return _kernel_transform(
        phi, v, (a - phi.m) / 2, "cos", False, n_samples, rng, workers, chunk_size
    )


def sine_transform(
    f: ManifoldFunction,
    u: Frame,
    alpha: ParamLike,
    n_samples: int,
    rng: SeededRng,
    *,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> MCEstimate:
    """int f(v) det(I_m - v'uu'v)^{(alpha+k-n)/2} d_*v; degenerate when k + m > n."""
    _check_ambient(f, u)
    a = _alpha(alpha)
    if u.m + f.m > f.n:
        return _degenerate(n_samples)
    check_strip(a, f.m)
    return _kernel_transform(
        f, u, (a + u.m - f.n) / 2, "sin", True, n_samples, rng, workers, chunk_size
    )


def dual_sine_transform(
    phi: ManifoldFunction,
    v: Frame,
    alpha: ParamLike,
    n_samples: int,
    rng: SeededRng,
    *,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> MCEstimate:
    """int phi(u) det(I_m - v'uu'v)^{(alpha+k-n)/2} d_*u for phi on V_{n,k}."""
    _check_ambient(phi, v)
    a = _alpha(alpha)
    if v.m + phi.m > phi.n:
        return _degenerate(n_samples)
    check_strip(a, v.m)
    return _kernel_transform(
        phi,
        v,
        (a + phi.m - phi.n) / 2,
        "sin",
        False,
        n_samples,
        rng,
        workers,
        chunk_size,
    )


def funk_transform(
    f: ManifoldFunction,
    u: Frame,
    n_samples: int,
    rng: SeededRng,
    *,
    completion: np.ndarray | None = None,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> MCEstimate:
    """Average of f over the m-frames orthogonal to u.

    Realised as f(g_u [omega; 0]) = f(u~ omega) with omega Haar on V_{n-k,m};
    ``completion`` overrides the orthonormal basis u~ of {u}^perp.
    """
    _check_ambient(f, u)
    if u.m + f.m > f.n:
        raise DimensionError(
            f"Funk transform needs k + m <= n, got n={f.n}, m={f.m}, k={u.m}"
        )
    basis = complement(u.entries) if completion is None else np.asarray(completion)
    return integrate(
        FiberIntegrand(f, basis), n_samples, rng, workers=workers, chunk_size=chunk_size
    )


def dual_funk_transform(
    phi: ManifoldFunction,
    v: Frame,
    n_samples: int,
    rng: SeededRng,
    *,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> MCEstimate:
    """Average of phi (on V_{n,k}) over the k-frames orthogonal to v in V_{n,m}."""
    _check_ambient(phi, v)
    if v.m + phi.m > phi.n:
        raise DimensionError(
            f"dual Funk transform needs k + m <= n, got n={phi.n}, m={v.m}, k={phi.m}"
        )
    basis = complement(v.entries)
    return integrate(
        FiberIntegrand(phi, basis),
        n_samples,
        rng,
        workers=workers,
        chunk_size=chunk_size,
    )


def _check_square(f: ManifoldFunction, u: Frame) -> None:
    if u.m != f.m:
        raise DimensionError(f"u must be an m-frame (m={f.m}), got k={u.m}")


def M_transform(
    f: ManifoldFunction,
    u: Frame,
    alpha: ParamLike,
    n_samples: int,
    rng: SeededRng,
    **kwargs,
) -> MCEstimate:
    """int f(v) |u'v|^{alpha-m} d_*v, the cosine transform with k = m."""
    _check_square(f, u)
    return cosine_transform(f, u, alpha, n_samples, rng, **kwargs)


def Q_transform(
    f: ManifoldFunction,
    u: Frame,
    alpha: ParamLike,
    n_samples: int,
    rng: SeededRng,
    **kwargs,
) -> MCEstimate:
    """int f(v) det(I_m - v'uu'v)^{(alpha+m-n)/2} d_*v for 2m <= n."""
    _check_square(f, u)
    if 2 * f.m > f.n:
        raise DimensionError(f"Q-transform needs 2m <= n, got n={f.n}, m={f.m}")
    return sine_transform(f, u, alpha, n_samples, rng, **kwargs)


def M_normalized(
    f: ManifoldFunction,
    u: Frame,
    alpha: ParamLike,
    n_samples: int,
    rng: SeededRng,
    **kwargs,
) -> MCEstimate:
    """delta_{n,m}(alpha) * M^alpha f; alpha on the polar set is excluded."""
    factor = delta_norm(f.n, f.m, alpha)
    return M_transform(f, u, alpha, n_samples, rng, **kwargs).scaled(factor)


@dataclass(frozen=True, eq=False)
class DualityIntegrand:
    """f(v) phi(u) for a uniformly distributed orthogonal pair (u, v).

    ``outer_is_u`` draws u first and v in its orthogonal fiber (the Funk side);
    otherwise v first (the dual Funk side).
    """

    f: ManifoldFunction
    phi: ManifoldFunction
    outer_is_u: bool

    def __call__(self, gen: np.random.Generator, size: int) -> np.ndarray:
        n = self.f.n
        if self.outer_is_u:
            u = sample_haar(gen, n, self.phi.m, size)
            omega = sample_haar(gen, n - self.phi.m, self.f.m, size)
            v = complement(u) @ omega
        else:
            v = sample_haar(gen, n, self.f.m, size)
            theta = sample_haar(gen, n - self.f.m, self.phi.m, size)
            u = complement(v) @ theta
        return (self.f.evaluate_batch(v) * self.phi.evaluate_batch(u)).astype(complex)


def duality_residual(
    f: ManifoldFunction,
    phi: ManifoldFunction,
    n_samples: int,
    rng: SeededRng,
    *,
    workers: int = 1,
) -> Residual:
    """int (F f) phi d_*u - int f (F^ phi) d_*v on independent streams.

    f lives on V_{n,m}, phi on V_{n,k}; requires k + m <= n.
    """
    if f.n != phi.n:
        raise DimensionError("f and phi must share the ambient dimension")
    if f.m + phi.m > f.n:
        raise DimensionError(
            f"duality needs k + m <= n, got n={f.n}, m={f.m}, k={phi.m}"
        )
    lhs = integrate(
        DualityIntegrand(f, phi, True), n_samples, rng.child(0), workers=workers
    )
    rhs = integrate(
        DualityIntegrand(f, phi, False), n_samples, rng.child(1), workers=workers
    )
    return Residual(
        value=lhs.value - rhs.value,
        stderr=math.hypot(lhs.stderr, rhs.stderr),
        lhs=lhs,
        rhs=rhs,
    )


@dataclass(frozen=True, eq=False)
class DualCosineOfFunkIntegrand:
    """Nested estimator of (dual cosine of F_{m,k} f)(v).

    Each outer draw u in V_{n,k} carries ``inner`` draws of the Funk fiber.
    """

    f: ManifoldFunction
    v: np.ndarray
    k: int
    exponent: complex
    inner: int

    def __call__(self, gen: np.random.Generator, size: int) -> np.ndarray:
        n, m = self.f.n, self.f.m
        u = sample_haar(gen, n, self.k, size)
        omega = sample_haar(gen, n - self.k, m, size * self.inner)
        omega = omega.reshape(size, self.inner, n - self.k, m)
        fiber = complement(u)[:, None, :, :] @ omega
        funk = self.f.evaluate_batch(fiber).mean(axis=1)
        return funk * kernel_power(gram_det_cos(u, self.v), self.exponent)


def inversion_chain_residual(
    f: ManifoldFunction,
    v: Frame,
    k: int,
    alpha: ParamLike,
    n_samples: int,
    rng: SeededRng,
    *,
    inner_samples: int | None = None,
    workers: int = 1,
) -> Residual:
    """Residual of the convergent-strip precursor of Funk inversion.

    LHS = (dual cosine of F_{m,k} f)(v) / Gamma_m(alpha/2), by nested Monte Carlo.
    RHS = Gamma_m((n-m)/2)/Gamma_m(k/2) * (Q^beta f)(v) / Gamma_m(beta/2) with
    beta = alpha + n - k - m.
    """
    n, m = f.n, f.m
    _check_ambient(f, v)
    if not f.right_o_invariant:
        raise ValueError("inversion chain needs a right O(m)-invariant f")
    if not m <= k <= n - m:
        raise DimensionError(
            f"inversion chain needs m <= k <= n - m, got {n=}, {m=}, {k=}"
        )
    a = _alpha(alpha)
    beta = a + n - k - m
    check_strip(a, m)
    check_strip(beta, m, label="alpha + n - k - m")

    inner = inner_samples or max(1, round(math.sqrt(n_samples)))
    logger.debug("Nested estimator with %d outer x %d inner draws", n_samples, inner)
    nested = DualCosineOfFunkIntegrand(f, v.entries, k, (a - k) / 2, inner)
    lhs = integrate(nested, n_samples, rng.child(0), workers=workers)
    lhs = lhs.scaled(reciprocal_siegel_gamma(m, a / 2))

    q = Q_transform(f, v, beta, n_samples, rng.child(1), workers=workers)
    factor = siegel_gamma_ratio(m, [(n - m) / 2], [k / 2])
    rhs = q.scaled(factor * reciprocal_siegel_gamma(m, beta / 2))

    return Residual(
        value=lhs.value - rhs.value,
        stderr=math.hypot(lhs.stderr, rhs.stderr),
        lhs=lhs,
        rhs=rhs,
    )


def _pathwise(lhs_values: np.ndarray, rhs_values: np.ndarray) -> Residual:
    keep = ~(np.isnan(lhs_values) | np.isnan(rhs_values))
    diff = lhs_values[keep] - rhs_values[keep]
    scale = np.maximum(1.0, np.abs(lhs_values[keep]))
    estimate = estimate_from_values(diff)
    return Residual(
        value=estimate.value,
        stderr=estimate.stderr,
        lhs=estimate_from_values(lhs_values),
        rhs=estimate_from_values(rhs_values),
        pathwise_max=float(np.max(np.abs(diff) / scale)),
    )


def sine_complement_residual(
    f: ManifoldFunction,
    u: Frame,
    alpha: ParamLike,
    n_samples: int,
    rng: SeededRng,
) -> Residual:
    """Sine transform at u against the cosine transform at a complement of u.

    Both integrands consume the same Haar draws, so the integrands agree sample
    by sample; ``pathwise_max`` is relative to max(1, |value|).
    """
    _check_ambient(f, u)
    if u.m + f.m > f.n:
        raise DimensionError(
            f"complement relation needs k + m <= n, got n={f.n}, m={f.m}, k={u.m}"
        )
    a = _alpha(alpha)
    check_strip(a, f.m)
    exponent = (a + u.m - f.n) / 2
    u_perp = complement(u.entries)
    sine = KernelIntegrand(f, u.entries, exponent, "sin")
    cosine = KernelIntegrand(f, u_perp, exponent, "cos")
    return _pathwise(
        sample_values(sine, n_samples, rng), sample_values(cosine, n_samples, rng)
    )


@dataclass(frozen=True, eq=False)
class ComplementPairIntegrand:
    """Dual cosine integrand at v and its complement form at v~ on the same u."""

    phi: ManifoldFunction
    v: np.ndarray
    v_perp: np.ndarray
    exponent: complex
    side: Literal["lhs", "rhs"]

    def __call__(self, gen: np.random.Generator, size: int) -> np.ndarray:
        u = sample_haar(gen, self.phi.n, self.phi.m, size)
        values = self.phi.evaluate_batch(u)
        if self.side == "lhs":
            det = gram_det_cos(u, self.v)
        else:
            # det(u~' v~ v~' u~) with u~ spanning {u}^perp
            det = gram_det_cos(self.v_perp, complement(u))
        return values * kernel_power(det, self.exponent)


def dual_cosine_complement_residual(
    phi: ManifoldFunction,
    v: Frame,
    alpha: ParamLike,
    n_samples: int,
    rng: SeededRng,
) -> Residual:
    """Dual cosine of phi at v against C^{alpha+n-k-m}_{n-k,n-m} phi_1 at v~.

    phi_1(u~) = phi(u) for u~ spanning {u}^perp; the exponents coincide, so on
    shared draws the integrands agree pointwise.
    """
    _check_ambient(phi, v)
    n, k, m = phi.n, phi.m, v.m
    if not m <= k <= n - 1:
        raise DimensionError(
            f"complement relation needs m <= k <= n-1, got {n=}, {m=}, {k=}"
        )
    a = _alpha(alpha)
    check_strip(a, m)
    v_perp = complement(v.entries)
    exponent = (a - k) / 2
    lhs = ComplementPairIntegrand(phi, v.entries, v_perp, exponent, "lhs")
    rhs = ComplementPairIntegrand(phi, v.entries, v_perp, exponent, "rhs")
    return _pathwise(
        sample_values(lhs, n_samples, rng), sample_values(rhs, n_samples, rng)
    )


def funk_completion_residual(
    f: ManifoldFunction,
    u: Frame,
    n_samples: int,
    rng: SeededRng,
) -> Residual:
    """Funk transform with the default g_u against a rotated completion.

    The result must not depend on the choice of g_u with g_u u_0 = u.
    """
    basis = complement(u.entries)
    twist = sample_haar(rng.child(2).generator(), basis.shape[-1], basis.shape[-1])
    first = funk_transform(f, u, n_samples, rng.child(0))
    second = funk_transform(f, u, n_samples, rng.child(1), completion=basis @ twist)
    return Residual(
        value=first.value - second.value,
        stderr=math.hypot(first.stderr, second.stderr),
        lhs=first,
        rhs=second,
    )


def evaluate_request(
    request: TransformRequest,
    f: ManifoldFunction,
    frame: Frame,
    *,
    workers: int = 1,
) -> MCEstimate:
    """Dispatch a TransformRequest to the matching transform."""
    rng = SeededRng(request.seed)
    kwargs = {"workers": workers}
    if request.kind in ("funk", "dual_funk"):
        op = funk_transform if request.kind == "funk" else dual_funk_transform
        return op(f, frame, request.n_samples, rng, **kwargs)
    if request.alpha is None:
        raise DimensionError(f"{request.kind} transform needs alpha")
    ops = {
        "cosine": cosine_transform,
        "dual_cosine": dual_cosine_transform,
        "sine": sine_transform,
        "dual_sine": dual_sine_transform,
        "M": M_transform,
        "Q": Q_transform,
        "M_normalized": M_normalized,
    }
    return ops[request.kind](f, frame, request.alpha, request.n_samples, rng, **kwargs)


def request_dims(request: TransformRequest) -> tuple[tuple[int, int], tuple[int, int]]:
    """(function dims, frame dims) implied by a request.

    Direct transforms take f on V_{n,m} and u in V_{n,k}; dual transforms take
    phi on V_{n,k} and v in V_{n,m}; M, Q and M_normalized use k = m.
    """
    n, m, k = request.n, request.m, request.k
    if request.kind in ("dual_cosine", "dual_sine", "dual_funk"):
        return (n, k), (n, m)
    if request.kind in ("M", "Q", "M_normalized"):
        return (n, m), (n, m)
    return (n, m), (n, k)
