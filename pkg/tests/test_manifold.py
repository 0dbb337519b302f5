"""Tests for manifold module."""

import numpy as np
import pytest
from scipy import stats

from stiefel_transforms.errors import DimensionError, RankError
from stiefel_transforms.manifold import (
    complement,
    complement_frame,
    gram_det_cos,
    gram_det_sin,
    haar_frame,
    polar_decompose,
    rotation_from_frame,
    sample_haar,
    second_moment,
    sqrtm_psd,
)
from stiefel_transforms.models import Frame, SeededRng


class TestSampleHaar:
    """Tests for sample_haar function."""

    def test_frames_are_orthonormal(self) -> None:
        """Test that every sampled frame has orthonormal columns."""
        v = sample_haar(np.random.default_rng(0), 5, 3, 200)
        assert v.shape == (200, 5, 3)
        gram = np.swapaxes(v, -1, -2) @ v
        assert np.allclose(gram, np.eye(3), atol=1e-12)

    def test_single_frame_shape(self) -> None:
        """Test that size=None returns one (n, m) frame."""
        v = sample_haar(np.random.default_rng(0), 4, 2)
        assert v.shape == (4, 2)

    def test_invalid_dimensions(self) -> None:
        """Test that m > n raises DimensionError."""
        with pytest.raises(DimensionError):
            sample_haar(np.random.default_rng(0), 2, 3)

    def test_seeded_stream_is_reproducible(self) -> None:
        """Test that the same seeded stream gives the same frame."""
        first = haar_frame(SeededRng(42), 6, 2)
        second = haar_frame(SeededRng(42), 6, 2)
        other = haar_frame(SeededRng(42).child(1), 6, 2)
        assert np.array_equal(first.entries, second.entries)
        assert not np.allclose(first.entries, other.entries)

    def test_second_moment_is_isotropic(self) -> None:
        """Test that E[vv'] = (m/n) I_n within sampling error."""
        n, m = 4, 2
        mean, stderr = second_moment(SeededRng(1), n, m, 40000)
        deviation = np.abs(mean - (m / n) * np.eye(n))
        assert np.all(deviation <= 5 * stderr + 1e-12)

    def test_line_is_a_fair_coin(self) -> None:
        """Test that Haar frames of V_{1,1} are +1 or -1 with equal frequency."""
        size = 20000
        v = sample_haar(np.random.default_rng(11), 1, 1, size)
        assert set(np.unique(v)) == {-1.0, 1.0}
        frequency = np.mean(v == 1.0)
        assert abs(frequency - 0.5) < 5 * 0.5 / np.sqrt(size)

    @pytest.mark.parametrize(("n", "m"), [(3, 1), (4, 2), (5, 3)])
    def test_invariant_under_fixed_rotation(self, n: int, m: int) -> None:
        """Test that g v and v follow the same law for a fixed rotation g."""
        g = rotation_from_frame(haar_frame(SeededRng(21), n, n - 1)).entries
        first = sample_haar(np.random.default_rng(22), n, m, 4000)
        second = g @ sample_haar(np.random.default_rng(23), n, m, 4000)
        for stat in (lambda w: w[:, 0, 0], lambda w: w[:, 0, -1] * w[:, -1, 0]):
            result = stats.ks_2samp(stat(first), stat(second))
            assert result.pvalue > 1e-4


class TestFrame:
    """Tests for Frame validation and serialisation."""

    def test_rejects_non_orthonormal(self) -> None:
        """Test that non-orthonormal columns raise DimensionError."""
        with pytest.raises(DimensionError, match="orthonormal"):
            Frame(np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]))

    def test_rejects_wide_matrix(self) -> None:
        """Test that m > n raises DimensionError."""
        with pytest.raises(DimensionError):
            Frame(np.eye(2, 3))

    def test_standard_frame(self) -> None:
        """Test that the standard frame is [0; I_k]."""
        u = Frame.standard(4, 2)
        assert np.array_equal(u.entries[2:], np.eye(2))
        assert np.array_equal(u.entries[:2], np.zeros((2, 2)))

    def test_dict_preserves_entries(self, frame_4_2: Frame) -> None:
        """Test that to_dict/from_dict keeps the entries."""
        restored = Frame.from_dict(frame_4_2.to_dict())
        assert np.array_equal(restored.entries, frame_4_2.entries)

    def test_from_dict_wrong_size(self) -> None:
        """Test that a wrong entry count raises DimensionError."""
        with pytest.raises(DimensionError, match="entries"):
            Frame.from_dict({"n": 3, "m": 1, "entries": [1.0, 0.0]})

    def test_entries_are_read_only(self, frame_4_2: Frame) -> None:
        """Test that frame entries cannot be mutated in place."""
        with pytest.raises(ValueError):
            frame_4_2.entries[0, 0] = 2.0


class TestPolarDecompose:
    """Tests for polar_decompose and sqrtm_psd functions."""

    def test_reconstructs_matrix(self) -> None:
        """Test that x = v r^{1/2}."""
        x = np.random.default_rng(3).standard_normal((5, 2))
        v, r = polar_decompose(x)
        assert np.allclose(v.entries @ sqrtm_psd(r.entries), x, atol=1e-12)

    def test_rank_deficient_raises(self) -> None:
        """Test that a rank-deficient x raises RankError."""
        x = np.array([[1.0, 2.0], [2.0, 4.0], [0.0, 0.0]])
        with pytest.raises(RankError):
            polar_decompose(x)

    def test_scaled_axis(self) -> None:
        """Test that x = 2 e_1 in R^3 splits into v = e_1 and r = (4)."""
        x = np.array([[2.0], [0.0], [0.0]])
        v, r = polar_decompose(x)
        assert np.allclose(v.entries, [[1.0], [0.0], [0.0]], atol=1e-12)
        assert np.allclose(r.entries, [[4.0]], atol=1e-12)

    def test_frame_is_its_own_polar_part(self, frame_5_2: Frame) -> None:
        """Test that a frame x decomposes as (x, I_m)."""
        v, r = polar_decompose(frame_5_2.entries)
        assert np.allclose(v.entries, frame_5_2.entries, atol=1e-12)
        assert np.allclose(r.entries, np.eye(2), atol=1e-12)


class TestComplement:
    """Tests for complement and rotation_from_frame functions."""

    def test_complement_is_orthogonal(self, frame_5_2: Frame) -> None:
        """Test that the completion is an orthonormal basis of {u}^perp."""
        u_perp = complement_frame(frame_5_2)
        assert u_perp.m == 3
        assert np.allclose(frame_5_2.entries.T @ u_perp.entries, 0, atol=1e-12)

    def test_batched_complement(self) -> None:
        """Test that complement works on stacks of frames."""
        u = sample_haar(np.random.default_rng(5), 4, 1, 10)
        u_perp = complement(u)
        assert u_perp.shape == (10, 4, 3)
        assert np.allclose(np.swapaxes(u, -1, -2) @ u_perp, 0, atol=1e-12)

    def test_full_frame_has_no_complement(self) -> None:
        """Test that k = n raises DimensionError."""
        with pytest.raises(DimensionError):
            complement(np.eye(3))

    def test_rotation_maps_standard_frame(self, frame_5_2: Frame) -> None:
        """Test that g_u [0; I_k] = u."""
        g = rotation_from_frame(frame_5_2)
        image = g.apply(Frame.standard(5, 2))
        assert np.allclose(image.entries, frame_5_2.entries, atol=1e-12)

    @pytest.mark.parametrize(("n", "k", "seed"), [(3, 1, 0), (5, 2, 1), (6, 4, 2)])
    def test_rotation_of_random_frame(self, n: int, k: int, seed: int) -> None:
        """Test that g_u is in O(n) with det +-1 and maps [0; I_k] to a Haar u."""
        u = haar_frame(SeededRng(seed), n, k)
        g = rotation_from_frame(u).entries
        assert np.allclose(g.T @ g, np.eye(n), atol=1e-12)
        assert abs(abs(np.linalg.det(g)) - 1.0) < 1e-12
        assert np.allclose(g @ Frame.standard(n, k).entries, u.entries, atol=1e-12)


class TestGramDeterminants:
    """Tests for gram_det_cos and gram_det_sin functions."""

    def test_cos_vanishes_when_m_exceeds_k(self) -> None:
        """Test that det(v'uu'v) is identically zero for m > k."""
        gen = np.random.default_rng(8)
        u = sample_haar(gen, 4, 1, 20)
        v = sample_haar(gen, 4, 2, 20)
        assert np.array_equal(gram_det_cos(u, v), np.zeros(20))

    def test_sin_vanishes_when_m_exceeds_n_minus_k(self) -> None:
        """Test that det(I - v'uu'v) is identically zero for m > n - k."""
        gen = np.random.default_rng(8)
        u = sample_haar(gen, 4, 3, 20)
        v = sample_haar(gen, 4, 2, 20)
        assert np.array_equal(gram_det_sin(u, v), np.zeros(20))

    def test_cos_of_frame_with_itself(self, frame_4_2: Frame) -> None:
        """Test that det(u'uu'u) = 1."""
        assert gram_det_cos(frame_4_2, frame_4_2) == pytest.approx(1.0)

    def test_sin_is_cos_of_complement(self) -> None:
        """Test that det(I - v'uu'v) = det(v'u~u~'v)."""
        gen = np.random.default_rng(9)
        u = sample_haar(gen, 6, 2, 50)
        v = sample_haar(gen, 6, 3, 50)
        assert np.allclose(gram_det_sin(u, v), gram_det_cos(complement(u), v))

    def test_values_lie_in_unit_interval(self) -> None:
        """Test that Gram determinants lie in [0, 1]."""
        gen = np.random.default_rng(10)
        u = sample_haar(gen, 5, 2, 100)
        v = sample_haar(gen, 5, 2, 100)
        det = gram_det_cos(u, v)
        assert np.all((det >= 0) & (det <= 1))

    def test_ambient_mismatch(self) -> None:
        """Test that frames in different R^n raise DimensionError."""
        with pytest.raises(DimensionError):
            gram_det_cos(np.eye(3, 1), np.eye(4, 1))
