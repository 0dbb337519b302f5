"""Identity suites: the closed forms and identities checked by ``stiefel identity``.

Each suite builds a list of zero-argument checks returning CheckRecords. Checks
draw from ``SeededRng(seed).child(index)``, so a suite re-run with the same
seed reproduces every number regardless of ``workers``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from datetime import datetime, timezone
from functools import partial

import numpy as np

from stiefel_transforms.errors import ConfigError
from stiefel_transforms.functions import constant
from stiefel_transforms.gamma_toolkit import cosine_const, funk_const, multiplier_c
from stiefel_transforms.manifold import (
    complement,
    gram_det_cos,
    gram_det_sin,
    haar_frame,
    sample_haar,
    second_moment,
)
from stiefel_transforms.models import (
    CheckRecord,
    Frame,
    MatrixSpacePoint,
    MCEstimate,
    Residual,
    RunConfig,
    SeededRng,
    SuiteReport,
)
from stiefel_transforms.montecarlo import default_samples
from stiefel_transforms.rankone import (
    composition_identity_check,
    cos_lambda_multiplier_mc,
    funk_limit_multiplier,
    funk_multiplier_mc,
    gegenbauer,
    multiplier_decay_check,
)
from stiefel_transforms.registry import function_from_name
from stiefel_transforms.transforms import (
    PATHWISE_TOL,
    cosine_transform,
    dual_cosine_complement_residual,
    duality_residual,
    finite_variance,
    inversion_chain_residual,
    sine_complement_residual,
    tilted_cosine_transform,
)
from stiefel_transforms.zeta import (
    QuadratureSpec,
    SchwartzTestFunction,
    bernstein_continuation,
    bernstein_identity_residual,
    gaussian_zeta_closed_form,
    zeta_integral,
    zeta_limit,
)

logger = logging.getLogger(__name__)

N_SIGMA = 4.0
HAAR_N_SIGMA = 5.0
EXACT_TOL = 1e-12
BERNSTEIN_TOL = {1: 1e-4, 2: 1e-3}
LIMIT_TOL = 0.01
COMPOSITION_TOL = 1e-10
DECAY_TOL = 0.05
NESTED_OUTER_SAMPLES = 20_000
BERNSTEIN_POINTS = 20

Check = Callable[[], CheckRecord]
ProgressCallback = Callable[[int, int], None]


@dataclass(frozen=True)
class SuiteContext:
    """Inputs shared by the checks of one suite run.

    When n, m and k are all set, suites that accept a single case run only that
    case instead of their built-in grid.
    """

    n: int | None = None
    m: int | None = None
    k: int | None = None
    alpha: complex | None = None
    n_samples: int | None = None
    seed: int = 0
    workers: int = 1

    @property
    def single_case(self) -> bool:
        return None not in (self.n, self.m, self.k)

    def samples(self, m: int) -> int:
        return self.n_samples or default_samples(m)

    def rng(self, index: int) -> SeededRng:
        return SeededRng(self.seed).child(index)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def mc_record(
    name: str,
    identity: str,
    estimate: MCEstimate,
    reference: complex,
    *,
    n_sigma: float = N_SIGMA,
    **dims,
) -> CheckRecord:
    """Pass when |value - reference| <= n_sigma stderr (EXACT_TOL when stderr is 0)."""
    diff = abs(estimate.value - reference)
    sigma = float(diff / estimate.stderr) if estimate.stderr > 0 else None
    return CheckRecord(
        name=name,
        identity=identity,
        value=estimate.value,
        reference=complex(reference),
        passed=bool(diff <= max(n_sigma * estimate.stderr, EXACT_TOL)),
        stderr=estimate.stderr,
        sigma=sigma,
        **dims,
    )


def residual_record(
    name: str, identity: str, residual: Residual, **dims
) -> CheckRecord:
    return mc_record(
        name,
        identity,
        MCEstimate(residual.value, residual.stderr, 0),
        0j,
        **dims,
    )


def tolerance_record(
    name: str,
    identity: str,
    value: complex,
    reference: complex,
    tolerance: float,
    **dims,
) -> CheckRecord:
    """Pass when |value - reference| <= tolerance."""
    return CheckRecord(
        name=name,
        identity=identity,
        value=complex(value),
        reference=complex(reference),
        passed=bool(abs(value - reference) <= tolerance),
        tolerance=tolerance,
        **dims,
    )


def _label(prefix: str, **params) -> str:
    return prefix + " " + " ".join(f"{key}={value}" for key, value in params.items())


# -- closed forms -------------------------------------------------------------


def _closed_form_check(
    ctx: SuiteContext, index: int, n: int, m: int, k: int, alpha: complex
) -> CheckRecord:
    heavy = not finite_variance(alpha, m, k)
    if heavy:
        logger.debug("Tilted sampling for n=%d m=%d k=%d alpha=%s", n, m, k, alpha)
    transform = tilted_cosine_transform if heavy else cosine_transform
    estimate = transform(
        constant(n, m),
        Frame.standard(n, k),
        alpha,
        ctx.samples(m),
        ctx.rng(index),
        workers=ctx.workers,
    )
    prefix = "tilted cosine of 1" if heavy else "cosine of 1"
    return mc_record(
        _label(prefix, n=n, m=m, k=k, alpha=alpha),
        "cosine-closed-form",
        estimate,
        cosine_const(n, m, k, alpha),
        n=n,
        m=m,
        k=k,
        alpha=complex(alpha),
    )


def closed_form_checks(ctx: SuiteContext) -> list[Check]:
    if ctx.single_case:
        alpha = ctx.alpha if ctx.alpha is not None else complex(ctx.m + 1)
        cases = [(ctx.n, ctx.m, ctx.k, alpha)]
    else:
        cases = [
            (n, m, k, complex(alpha))
            for n in (3, 4, 5)
            for m in (1, 2)
            for k in range(m, n)
            for alpha in (m + 0.5, m + 1.0, m + 2.0)
        ]
    return [
        partial(_closed_form_check, ctx, i, *case) for i, case in enumerate(cases)
    ]


def _gaussian_zeta_check(
    ctx: SuiteContext, index: int, n: int, m: int, alpha: float
) -> CheckRecord:
    quadrature = QuadratureSpec(
        n_samples=ctx.samples(m),
        seed=ctx.seed + index,
        workers=ctx.workers,
    )
    estimate = zeta_integral(SchwartzTestFunction.gaussian(n, m), alpha, quadrature)
    return mc_record(
        _label("gaussian zeta", n=n, m=m, alpha=alpha),
        "gaussian-zeta",
        estimate,
        gaussian_zeta_closed_form(n, m, alpha),
        n=n,
        m=m,
        alpha=complex(alpha),
    )


def gaussian_zeta_checks(ctx: SuiteContext) -> list[Check]:
    cases = [
        (n, m, m + shift)
        for m in (1, 2)
        for n in range(max(2, m), 5)
        for shift in (0.5, 1.0, 2.0)
    ]
    return [
        partial(_gaussian_zeta_check, ctx, i, *case) for i, case in enumerate(cases)
    ]


# -- Bernstein identity and continuation ---------------------------------------


def well_conditioned_point(
    gen: np.random.Generator, n: int, m: int
) -> MatrixSpacePoint:
    """x = v diag(sqrt(e)), v Haar and e uniform in [1, 2]; eig(x'x) lies in [1, 2]."""
    v = sample_haar(gen, n, m)
    scales = np.sqrt(gen.uniform(1.0, 2.0, size=m))
    return MatrixSpacePoint(v * scales)


def _bernstein_check(
    ctx: SuiteContext, index: int, n: int, m: int, alpha: float
) -> CheckRecord:
    x = well_conditioned_point(ctx.rng(index).generator(), n, m)
    residual = bernstein_identity_residual(alpha, 1, m, n, x)
    return tolerance_record(
        _label("bernstein", n=n, m=m, alpha=alpha, point=index),
        "bernstein",
        residual,
        0.0,
        BERNSTEIN_TOL[m],
        n=n,
        m=m,
        alpha=complex(alpha),
    )


def bernstein_checks(ctx: SuiteContext) -> list[Check]:
    cases = []
    for m, n, alphas in ((1, 3, (4.0, 2.5, 5.0)), (2, 3, (3.0, 3.5, 5.0))):
        for p in range(BERNSTEIN_POINTS):
            cases.append((n, m, alphas[p % len(alphas)]))
    # B_1(0) = 0: |x|^{2-n} is harmonic away from the origin
    cases.extend((n, 1, 0.0) for n in (3, 4))
    return [partial(_bernstein_check, ctx, i, *case) for i, case in enumerate(cases)]


def _continuation_check(
    ctx: SuiteContext, index: int, n: int, m: int, alpha: float
) -> CheckRecord:
    quadrature = QuadratureSpec(
        n_samples=ctx.samples(m), seed=ctx.seed + index, workers=ctx.workers
    )
    f = SchwartzTestFunction.gaussian(n, m)
    continued = bernstein_continuation(f, alpha, 1, quadrature)
    name = _label("continued zeta", n=n, m=m, alpha=alpha)
    dims = {"n": n, "m": m, "alpha": complex(alpha)}
    if alpha > m - 1:
        direct_spec = QuadratureSpec(ctx.samples(m), ctx.seed + 1000 + index)
        direct = zeta_integral(f, alpha, direct_spec)
        combined = MCEstimate(
            continued.value - direct.value,
            math.hypot(continued.stderr, direct.stderr),
            continued.n_samples,
        )
        return mc_record(
            name + " vs direct", "bernstein-continuation", combined, 0j, **dims
        )
    return mc_record(
        name,
        "bernstein-continuation",
        continued,
        gaussian_zeta_closed_form(n, m, alpha),
        **dims,
    )


def continuation_checks(ctx: SuiteContext) -> list[Check]:
    cases = [(3, 1, 2.5), (3, 1, -0.5), (4, 1, -0.5), (3, 2, 0.5)]
    return [
        partial(_continuation_check, ctx, i, *case) for i, case in enumerate(cases)
    ]


def _zeta_limit_check(ctx: SuiteContext, index: int, n: int) -> CheckRecord:
    quadrature = QuadratureSpec(n_samples=ctx.samples(1), seed=ctx.seed + index)
    result = zeta_limit(SchwartzTestFunction.gaussian(n, 1), quadrature)
    return tolerance_record(
        _label("zeta limit", n=n, m=1),
        "zeta-limit",
        result.relative_error,
        0.0,
        LIMIT_TOL,
        n=n,
        m=1,
    )


def zeta_limit_checks(ctx: SuiteContext) -> list[Check]:
    return [partial(_zeta_limit_check, ctx, i, n) for i, n in enumerate((2, 3, 4))]


# -- Funk duality, complements, inversion --------------------------------------


def _duality_check(
    ctx: SuiteContext, index: int, n: int, m: int, k: int
) -> CheckRecord:
    f = function_from_name("quad:1", n, m)
    phi = function_from_name("quad:2", n, k)
    residual = duality_residual(
        f, phi, ctx.samples(m), ctx.rng(index), workers=ctx.workers
    )
    return residual_record(
        _label("funk duality", n=n, m=m, k=k),
        "funk-duality",
        residual,
        n=n,
        m=m,
        k=k,
    )


def duality_checks(ctx: SuiteContext) -> list[Check]:
    if ctx.single_case:
        cases = [(ctx.n, ctx.m, ctx.k)]
    else:
        cases = [(3, 1, 1), (4, 1, 2), (5, 2, 2)]
    return [partial(_duality_check, ctx, i, *case) for i, case in enumerate(cases)]


def _sine_complement_check(
    ctx: SuiteContext, index: int, n: int, m: int, k: int, alpha: complex
) -> CheckRecord:
    f = function_from_name("quad:3", n, m)
    u = haar_frame(ctx.rng(index).child(0), n, k)
    residual = sine_complement_residual(f, u, alpha, ctx.samples(m), ctx.rng(index))
    return tolerance_record(
        _label("sine vs complement cosine", n=n, m=m, k=k, alpha=alpha),
        "sine-complement",
        residual.pathwise_max,
        0.0,
        PATHWISE_TOL,
        n=n,
        m=m,
        k=k,
        alpha=complex(alpha),
    )


def _dual_cosine_complement_check(
    ctx: SuiteContext, index: int, n: int, m: int, k: int, alpha: complex
) -> CheckRecord:
    phi = function_from_name("quad:4", n, k)
    v = haar_frame(ctx.rng(index).child(0), n, m)
    residual = dual_cosine_complement_residual(
        phi, v, alpha, ctx.samples(m), ctx.rng(index)
    )
    return tolerance_record(
        _label("dual cosine vs complement", n=n, m=m, k=k, alpha=alpha),
        "dual-cosine-complement",
        residual.pathwise_max,
        0.0,
        PATHWISE_TOL,
        n=n,
        m=m,
        k=k,
        alpha=complex(alpha),
    )


def _kernel_identity_check(
    ctx: SuiteContext, index: int, n: int, m: int, k: int
) -> CheckRecord:
    gen = ctx.rng(index).generator()
    u = sample_haar(gen, n, k, 1000)
    v = sample_haar(gen, n, m, 1000)
    lhs = gram_det_cos(u, v)
    rhs = gram_det_cos(complement(v), complement(u))
    return tolerance_record(
        _label("complement kernel", n=n, m=m, k=k),
        "complement-kernel",
        float(np.max(np.abs(lhs - rhs))),
        0.0,
        PATHWISE_TOL,
        n=n,
        m=m,
        k=k,
    )


def complement_checks(ctx: SuiteContext) -> list[Check]:
    if ctx.single_case:
        alpha = ctx.alpha if ctx.alpha is not None else complex(ctx.m + 1)
        sine_cases = [(ctx.n, ctx.m, ctx.k, alpha)]
        dual_cases = [(ctx.n, ctx.m, ctx.k, alpha)] if ctx.m <= ctx.k else []
    else:
        sine_cases = [(3, 1, 1, 2.5), (4, 1, 1, 2.5), (5, 2, 2, 3.5)]
        dual_cases = [(4, 1, 2, 2.5), (5, 2, 2, 3.0)]
    checks: list[Check] = []
    for case in sine_cases:
        checks.append(partial(_sine_complement_check, ctx, len(checks), *case))
    for case in dual_cases:
        checks.append(partial(_dual_cosine_complement_check, ctx, len(checks), *case))
    for n, m, k, _ in dual_cases:
        checks.append(partial(_kernel_identity_check, ctx, len(checks), n, m, k))
    return checks


def _inversion_check(
    ctx: SuiteContext,
    index: int,
    n: int,
    m: int,
    k: int,
    alpha: complex,
    name: str,
) -> CheckRecord:
    f = function_from_name(name, n, m)
    v = haar_frame(ctx.rng(index).child(2), n, m)
    outer = min(ctx.samples(m), NESTED_OUTER_SAMPLES)
    residual = inversion_chain_residual(
        f, v, k, alpha, outer, ctx.rng(index), workers=ctx.workers
    )
    return residual_record(
        _label("inversion chain", n=n, m=m, k=k, alpha=alpha, f=name),
        "inversion-chain",
        residual,
        n=n,
        m=m,
        k=k,
        alpha=complex(alpha),
    )


def inversion_checks(ctx: SuiteContext) -> list[Check]:
    if ctx.single_case:
        alpha = ctx.alpha if ctx.alpha is not None else complex(ctx.m + 0.5)
        cases = [(ctx.n, ctx.m, ctx.k, alpha)]
    else:
        cases = [(4, 1, 1, 1.5), (5, 1, 2, 1.5)]
    checks: list[Check] = []
    for case in cases:
        for name in ("const", "quad:5"):
            checks.append(partial(_inversion_check, ctx, len(checks), *case, name))
    return checks


# -- rank one -------------------------------------------------------------------

MULTIPLIER_LAMBDAS = {3: (1.25, 2.0, 1.25 + 0.5j), 4: (1.75, 2.5, 1.75 + 0.5j)}


def _multiplier_check(
    ctx: SuiteContext, index: int, n: int, j: int, lam: complex
) -> CheckRecord:
    estimate = cos_lambda_multiplier_mc(
        j, lam, n, ctx.samples(1), ctx.rng(index), workers=ctx.workers
    )
    return mc_record(
        _label("multiplier", n=n, j=j, lam=lam),
        "cos-lambda-multiplier",
        estimate,
        multiplier_c(j, lam, n),
        n=n,
        m=1,
        alpha=complex(lam),
    )


def multiplier_checks(ctx: SuiteContext) -> list[Check]:
    cases = [
        (n, j, lam)
        for n, lams in MULTIPLIER_LAMBDAS.items()
        for lam in lams
        for j in range(7)
    ]
    return [partial(_multiplier_check, ctx, i, *case) for i, case in enumerate(cases)]


def _composition_check(ctx: SuiteContext, n: int) -> CheckRecord:
    report = composition_identity_check(40, (0.3, -0.3, 1.2, -1.2, 0.5 + 0.5j), n)
    return tolerance_record(
        _label("composition", n=n, j_max=40),
        "cos-lambda-composition",
        report.statistic,
        0.0,
        COMPOSITION_TOL,
        n=n,
        m=1,
    )


def _decay_check(ctx: SuiteContext, lam: complex) -> CheckRecord:
    report = multiplier_decay_check(lam, 400)
    return tolerance_record(
        _label("multiplier decay", lam=lam, j_max=400),
        "multiplier-decay",
        report.statistic,
        -lam.real,
        DECAY_TOL,
        n=report.n,
        m=1,
        alpha=lam,
    )


def composition_checks(ctx: SuiteContext) -> list[Check]:
    checks: list[Check] = [partial(_composition_check, ctx, n) for n in (3, 4)]
    checks.extend(partial(_decay_check, ctx, complex(lam)) for lam in (1, 0, 2 + 1j))
    return checks


def _tilted_point(n: int, angle: float) -> Frame:
    u = np.zeros((n, 1))
    u[-1, 0] = math.cos(angle)
    u[0, 0] = math.sin(angle)
    return Frame(u)


def _funk_limit_check(
    ctx: SuiteContext, index: int, n: int, j: int, tilted: bool
) -> CheckRecord:
    point = _tilted_point(n, math.pi / 7) if tilted else None
    estimate = funk_multiplier_mc(
        j, n, ctx.samples(1), ctx.rng(index), point=point
    )
    where = "tilted" if tilted else "axis"
    return mc_record(
        _label("funk limit", n=n, j=j, at=where),
        "funk-limit",
        estimate.scaled(funk_const(n, 1, 1)),
        funk_limit_multiplier(j, n),
        n=n,
        m=1,
        k=1,
    )


def _funk_legendre_check(ctx: SuiteContext, index: int, j: int) -> CheckRecord:
    point = _tilted_point(3, math.pi / 7)
    estimate = funk_multiplier_mc(j, 3, ctx.samples(1), ctx.rng(index), point=point)
    return mc_record(
        _label("funk multiplier", n=3, j=j),
        "funk-legendre",
        estimate,
        gegenbauer(j, 0.5, 0.0),
        n=3,
        m=1,
        k=1,
    )


def funk_limit_checks(ctx: SuiteContext) -> list[Check]:
    checks: list[Check] = []
    for n in (3, 4):
        for j in (0, 2, 4):
            for tilted in (False, True):
                check = partial(_funk_limit_check, ctx, len(checks), n, j, tilted)
                checks.append(check)
    for j in (2, 4):
        checks.append(partial(_funk_legendre_check, ctx, len(checks), j))
    return checks


# -- sampler and structural checks ----------------------------------------------


def _haar_check(ctx: SuiteContext, index: int, n: int, m: int) -> CheckRecord:
    n_samples = ctx.n_samples or default_samples(2)
    mean, stderr = second_moment(ctx.rng(index), n, m, n_samples)
    expected = (m / n) * np.eye(n)
    sigma = np.abs(mean - expected) / np.where(stderr > 0, stderr, np.inf)
    worst = np.unravel_index(int(np.argmax(sigma)), sigma.shape)
    return CheckRecord(
        name=_label("haar second moment", n=n, m=m),
        identity="haar-moment",
        value=complex(mean[worst]),
        reference=complex(expected[worst]),
        passed=bool(np.max(sigma) <= HAAR_N_SIGMA),
        stderr=float(stderr[worst]),
        sigma=float(np.max(sigma)),
        n=n,
        m=m,
    )


def _degeneracy_check(
    ctx: SuiteContext, index: int, kind: str, n: int, m: int, k: int
) -> CheckRecord:
    gen = ctx.rng(index).generator()
    u = sample_haar(gen, n, k, 1000)
    v = sample_haar(gen, n, m, 1000)
    kernel = gram_det_cos(u, v) if kind == "cos" else gram_det_sin(u, v)
    return tolerance_record(
        _label(f"{kind} kernel vanishes", n=n, m=m, k=k),
        "exact-zero-kernel",
        float(np.max(np.abs(kernel))),
        0.0,
        0.0,
        n=n,
        m=m,
        k=k,
    )


def _descent_check(
    ctx: SuiteContext, index: int, n: int, m: int, k: int
) -> CheckRecord:
    f = function_from_name("quad:6", n, m)
    rng = ctx.rng(index)
    u = haar_frame(rng.child(0), n, k)
    gamma = sample_haar(rng.child(1).generator(), k, k)
    n_samples = min(ctx.samples(m), 10_000)
    first = cosine_transform(f, u, m + 1.5, n_samples, rng.child(2))
    rotated = Frame(u.entries @ gamma)
    second = cosine_transform(f, rotated, m + 1.5, n_samples, rng.child(2))
    return tolerance_record(
        _label("grassmannian descent", n=n, m=m, k=k),
        "grassmannian-descent",
        first.value,
        second.value,
        PATHWISE_TOL,
        n=n,
        m=m,
        k=k,
    )


def sampler_checks(ctx: SuiteContext) -> list[Check]:
    checks: list[Check] = []
    for n, m in ((3, 1), (4, 2), (6, 3)):
        checks.append(partial(_haar_check, ctx, len(checks), n, m))
    for case in (("cos", 4, 2, 1), ("sin", 4, 2, 3)):
        checks.append(partial(_degeneracy_check, ctx, len(checks), *case))
    for case in ((4, 1, 2), (5, 2, 3)):
        checks.append(partial(_descent_check, ctx, len(checks), *case))
    return checks


SUITES: dict[str, Callable[[SuiteContext], list[Check]]] = {
    "closed-form": closed_form_checks,
    "gaussian-zeta": gaussian_zeta_checks,
    "bernstein": bernstein_checks,
    "continuation": continuation_checks,
    "zeta-limit": zeta_limit_checks,
    "duality": duality_checks,
    "complement": complement_checks,
    "inversion": inversion_checks,
    "multipliers": multiplier_checks,
    "composition": composition_checks,
    "funk-limit": funk_limit_checks,
    "sampler": sampler_checks,
}


def run_suite(
    suite: str,
    ctx: SuiteContext,
    progress_callback: ProgressCallback | None = None,
) -> SuiteReport:
    """Run one suite (or ``all``) and collect its records.

    Args:
        suite: A key of SUITES, or ``all``.
        ctx: Dimensions, sample counts, seed and worker count.
        progress_callback: Optional callback(current, total) after each check.

    Returns:
        SuiteReport; ``passed`` is the conjunction of all records.
    """
    if suite == "all":
        checks = [check for build in SUITES.values() for check in build(ctx)]
    elif suite in SUITES:
        checks = SUITES[suite](ctx)
    else:
        raise ConfigError(
            "suite",
            f"unknown suite {suite!r}; choose from {', '.join(SUITES)} or all",
        )

    records = []
    for i, check in enumerate(checks):
        records.append(check())
        if progress_callback:
            progress_callback(i + 1, len(checks))
    report = SuiteReport(suite=suite, seed=ctx.seed, created=_now(), records=records)
    n_passed = len(records) - len(report.failures)
    logger.info("Suite %s: %d/%d checks passed", suite, n_passed, len(records))
    return report


def run(
    config: RunConfig, progress_callback: ProgressCallback | None = None
) -> SuiteReport:
    """Run the identity suite named by ``config.options['suite']``."""
    ctx = SuiteContext(
        n=config.n,
        m=config.m,
        k=config.k,
        alpha=config.alpha,
        n_samples=config.n_samples,
        seed=config.seed,
        workers=config.workers,
    )
    return run_suite(config.options.get("suite", "closed-form"), ctx, progress_callback)
