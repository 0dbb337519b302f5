"""Chunked, reproducible Monte Carlo integration.

``n_samples`` is cut into fixed-size chunks. Chunk ``i`` draws from its own
stream derived from ``(seed, stream, path, i)``, so the estimate depends only on
``(seed, n_samples, chunk_size)`` and never on how many workers ran the chunks.
Per-chunk statistics are merged in chunk order.
"""

from __future__ import annotations

import logging
import math
import multiprocessing
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from stiefel_transforms.errors import RejectionRateError
from stiefel_transforms.models import MCEstimate, SeededRng

logger = logging.getLogger(__name__)

DEFAULT_CHUNK_SIZE = 8192
DEFAULT_SCALAR_SAMPLES = 10**6
DEFAULT_MATRIX_SAMPLES = 10**5
MAX_REJECTION_RATE = 1e-6

# An integrand maps (generator, size) to `size` complex values; NaN marks a
# rejected sample (kernel evaluated on its singular set).
Integrand = Callable[[np.random.Generator, int], np.ndarray]


def default_samples(m: int) -> int:
    """Default sample count: 10^6 for scalar frames, 10^5 for matrix frames."""
    return DEFAULT_SCALAR_SAMPLES if m == 1 else DEFAULT_MATRIX_SAMPLES


def kernel_power(base: np.ndarray, exponent: complex) -> np.ndarray:
    """base**exponent for base >= 0 using the real logarithm.

    A zero base gives 0 when Re(exponent) > 0 and NaN (a rejected sample) when
    Re(exponent) <= 0; exponent 0 gives 1 everywhere.
    """
    base = np.asarray(base, dtype=float)
    if exponent == 0:
        return np.ones(base.shape, dtype=complex)
    positive = base > 0
    safe = np.where(positive, base, 1.0)
    out = np.exp(exponent * np.log(safe)).astype(complex)
    zero_value = 0.0 if exponent.real > 0 else np.nan
    return np.where(positive, out, zero_value)


@dataclass(frozen=True)
class ChunkStats:
    """Count, mean and centred sum of squares of one chunk."""

    count: int
    mean: complex
    m2: float
    rejected: int

    @classmethod
    def from_values(cls, values: np.ndarray) -> ChunkStats:
        values = np.asarray(values, dtype=complex)
        rejected = np.isnan(values)
        kept = values[~rejected]
        if kept.size == 0:
            return cls(0, 0j, 0.0, int(rejected.sum()))
        mean = complex(kept.mean())
        m2 = float(np.sum(np.abs(kept - mean) ** 2))
        return cls(int(kept.size), mean, m2, int(rejected.sum()))

    def merge(self, other: ChunkStats) -> ChunkStats:
        """Chan's pairwise combination; order-sensitive only in rounding."""
        count = self.count + other.count
        if count == 0:
            return ChunkStats(0, 0j, 0.0, self.rejected + other.rejected)
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / count
        m2 = self.m2 + other.m2 + abs(delta) ** 2 * self.count * other.count / count
        return ChunkStats(count, mean, m2, self.rejected + other.rejected)


def chunk_sizes(n_samples: int, chunk_size: int) -> list[int]:
    full, rest = divmod(n_samples, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def _run_chunk(task: tuple[Integrand, SeededRng, int, int]) -> ChunkStats:
    """Evaluate one chunk (module level so multiprocessing can pickle it)."""
    integrand, rng, index, size = task
    return ChunkStats.from_values(integrand(rng.generator(index), size))


def integrate(
    integrand: Integrand,
    n_samples: int,
    rng: SeededRng,
    *,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
    max_rejection_rate: float = MAX_REJECTION_RATE,
) -> MCEstimate:
    """Monte Carlo mean of ``integrand`` with its standard error.

    Args:
        integrand: Picklable callable ``(generator, size) -> values``.
        n_samples: Total number of draws.
        rng: Seeded stream; chunk ``i`` uses ``rng.generator(i)``.
        chunk_size: Draws per chunk; part of the reproducibility key.
        workers: Processes used to evaluate chunks; does not affect the result.
        max_rejection_rate: Abort threshold for samples on the singular set.

    Returns:
        MCEstimate with stderr = sample standard deviation / sqrt(accepted).
    """
    if n_samples < 2:
        raise ValueError(f"need at least 2 samples, got {n_samples}")
    tasks = [
        (integrand, rng, i, size)
        for i, size in enumerate(chunk_sizes(n_samples, chunk_size))
    ]
    logger.debug("Integrating %d samples in %d chunks", n_samples, len(tasks))

    if workers > 1 and len(tasks) > 1:
        with multiprocessing.Pool(processes=min(workers, len(tasks))) as pool:
            stats = list(pool.imap(_run_chunk, tasks))
    else:
        stats = [_run_chunk(task) for task in tasks]

    total = stats[0]
    for chunk in stats[1:]:
        total = total.merge(chunk)

    if total.rejected:
        rate = total.rejected / n_samples
        logger.info("Rejected %d samples on the kernel singular set", total.rejected)
        if rate > max_rejection_rate:
            raise RejectionRateError(
                f"rejection rate {rate:.2e} exceeds {max_rejection_rate:.0e}"
            )
    if total.count < 2:
        raise RejectionRateError("fewer than two samples survived rejection")

    variance = total.m2 / (total.count - 1)
    return MCEstimate(
        value=total.mean,
        stderr=math.sqrt(variance / total.count),
        n_samples=total.count,
        n_rejected=total.rejected,
    )


def sample_values(
    integrand: Integrand,
    n_samples: int,
    rng: SeededRng,
    *,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> np.ndarray:
    """Raw per-sample values drawn exactly as :func:`integrate` would draw them."""
    return np.concatenate(
        [
            np.asarray(integrand(rng.generator(i), size), dtype=complex)
            for i, size in enumerate(chunk_sizes(n_samples, chunk_size))
        ]
    )


def estimate_from_values(values: np.ndarray) -> MCEstimate:
    """MCEstimate of an already drawn sample."""
    stats = ChunkStats.from_values(values)
    if stats.count < 2:
        raise RejectionRateError("fewer than two usable samples")
    return MCEstimate(
        value=stats.mean,
        stderr=math.sqrt(stats.m2 / (stats.count - 1) / stats.count),
        n_samples=stats.count,
        n_rejected=stats.rejected,
    )
