"""Tests for montecarlo module."""

import numpy as np
import pytest

from stiefel_transforms.errors import RejectionRateError
from stiefel_transforms.functions import ManifoldFunction
from stiefel_transforms.models import SeededRng
from stiefel_transforms.montecarlo import (
    ChunkStats,
    chunk_sizes,
    default_samples,
    estimate_from_values,
    integrate,
    kernel_power,
    sample_values,
)
from stiefel_transforms.transforms import KernelIntegrand


class UniformIntegrand:
    """Uniform draws on [0, 1)."""

    def __call__(self, gen: np.random.Generator, size: int) -> np.ndarray:
        return gen.random(size)


class SometimesNan:
    """Uniform draws with every tenth value rejected."""

    def __call__(self, gen: np.random.Generator, size: int) -> np.ndarray:
        values = gen.random(size)
        values[::10] = np.nan
        return values


class TestKernelPower:
    """Tests for kernel_power function."""

    def test_positive_base(self) -> None:
        """Test that a positive base uses the real logarithm."""
        out = kernel_power(np.array([0.25, 1.0]), 0.5 + 0j)
        assert np.allclose(out, [0.5, 1.0])

    def test_complex_exponent(self) -> None:
        """Test a complex power of a positive base."""
        out = kernel_power(np.array([0.5]), 1 + 2j)
        assert out[0] == pytest.approx(0.5 ** (1 + 2j))

    def test_zero_base_positive_exponent(self) -> None:
        """Test that 0^a = 0 when Re a > 0."""
        assert kernel_power(np.array([0.0]), 0.5 + 0j)[0] == 0

    def test_zero_base_nonpositive_exponent_is_rejected(self) -> None:
        """Test that 0^a is NaN (rejected) when Re a <= 0."""
        assert np.isnan(kernel_power(np.array([0.0]), -0.5 + 0j)[0])

    def test_zero_exponent(self) -> None:
        """Test that exponent 0 gives ones, including at a zero base."""
        assert np.array_equal(kernel_power(np.array([0.0, 0.3]), 0j), [1.0, 1.0])


class TestChunkStats:
    """Tests for ChunkStats merging."""

    def test_merge_matches_pooled(self) -> None:
        """Test that merged chunk statistics equal those of the pooled values."""
        gen = np.random.default_rng(2)
        a, b = gen.standard_normal(300), gen.standard_normal(500) + 1.0
        merged = ChunkStats.from_values(a).merge(ChunkStats.from_values(b))
        pooled = ChunkStats.from_values(np.concatenate([a, b]))
        assert merged.count == pooled.count
        assert merged.mean == pytest.approx(pooled.mean, rel=1e-12)
        assert merged.m2 == pytest.approx(pooled.m2, rel=1e-10)

    def test_nan_values_are_counted_as_rejected(self) -> None:
        """Test that NaN values are excluded and counted."""
        stats = ChunkStats.from_values(np.array([1.0, np.nan, 3.0]))
        assert stats.count == 2
        assert stats.rejected == 1
        assert stats.mean == pytest.approx(2.0)


class TestIntegrate:
    """Tests for integrate function."""

    def test_uniform_mean(self, rng: SeededRng) -> None:
        """Test that the mean of U(0,1) is 1/2 within four standard errors."""
        estimate = integrate(UniformIntegrand(), 20000, rng, chunk_size=3000)
        assert estimate.n_samples == 20000
        assert estimate.sigma_distance(0.5) < 4
        assert estimate.stderr == pytest.approx(np.sqrt(1 / 12 / 20000), rel=0.05)

    def test_chunk_sizes(self) -> None:
        """Test that chunks cover the sample count exactly."""
        assert chunk_sizes(10, 4) == [4, 4, 2]
        assert chunk_sizes(8, 4) == [4, 4]

    def test_worker_count_does_not_change_result(
        self, quad_4_1: ManifoldFunction, rng: SeededRng
    ) -> None:
        """Test that results are bit-identical for one and several workers."""
        integrand = KernelIntegrand(quad_4_1, np.eye(4, 1), 0.5 + 0j, "cos")
        serial = integrate(integrand, 5000, rng, chunk_size=1000, workers=1)
        parallel = integrate(integrand, 5000, rng, chunk_size=1000, workers=2)
        assert serial.value == parallel.value
        assert serial.stderr == parallel.stderr

    def test_sample_values_match_integrate(
        self, quad_4_1: ManifoldFunction, rng: SeededRng
    ) -> None:
        """Test that raw sample values reproduce the integrate estimate."""
        integrand = KernelIntegrand(quad_4_1, np.eye(4, 1), 0.5 + 0j, "cos")
        values = sample_values(integrand, 3000, rng, chunk_size=1000)
        direct = integrate(integrand, 3000, rng, chunk_size=1000)
        assert estimate_from_values(values).value == pytest.approx(direct.value)

    def test_too_few_samples(self, rng: SeededRng) -> None:
        """Test that fewer than two samples raises ValueError."""
        with pytest.raises(ValueError, match="at least 2"):
            integrate(UniformIntegrand(), 1, rng)

    def test_rejection_rate_exceeded(self, rng: SeededRng) -> None:
        """Test that too many rejected samples raise RejectionRateError."""
        with pytest.raises(RejectionRateError):
            integrate(SometimesNan(), 1000, rng)

    def test_rejection_within_threshold(self, rng: SeededRng) -> None:
        """Test that rejected samples are reported when the rate is allowed."""
        estimate = integrate(SometimesNan(), 1000, rng, max_rejection_rate=0.2)
        assert estimate.n_rejected == 100
        assert estimate.n_samples == 900

    def test_default_samples(self) -> None:
        """Test the default sample counts for scalar and matrix frames."""
        assert default_samples(1) == 10**6
        assert default_samples(2) == 10**5
