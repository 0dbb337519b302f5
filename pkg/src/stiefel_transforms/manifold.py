"""Frames on Stiefel manifolds: Haar sampling, polar decomposition, complements.

Array-level helpers accept stacked inputs of shape ``(..., n, m)`` so that the
Monte Carlo integrands can work on whole chunks at once; the Frame-level API
wraps them for single points.
"""

from __future__ import annotations

import logging

import numpy as np

from stiefel_transforms.errors import DegenerateSampleError, DimensionError, RankError
from stiefel_transforms.models import Frame, PosDefMatrix, Rotation, SeededRng

logger = logging.getLogger(__name__)

RANK_TOL = 1e-10
DEGENERATE_TOL = 1e-12

FrameLike = Frame | np.ndarray


def as_array(x: FrameLike) -> np.ndarray:
    """Entries of a Frame, or the array itself."""
    if isinstance(x, Frame):
        return x.entries
    return np.asarray(x, dtype=float)


def _orthonormalize(gaussian: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """QR with the sign convention diag(R) > 0; returns (Q, diag(R))."""
    m = gaussian.shape[-1]
    if m == 1:
        norms = np.linalg.norm(gaussian, axis=-2, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            q = gaussian / norms
        return q, norms[..., 0, :]
    q, r = np.linalg.qr(gaussian)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    signs = np.where(diag < 0, -1.0, 1.0)
    return q * signs[..., None, :], np.abs(diag)


def _degenerate_rows(gaussian: np.ndarray, diag: np.ndarray) -> np.ndarray:
    scale = np.linalg.norm(gaussian, axis=(-2, -1))[..., None]
    return np.any(diag <= DEGENERATE_TOL * np.maximum(scale, 1.0), axis=-1)


def sample_haar(
    gen: np.random.Generator,
    n: int,
    m: int,
    size: int | None = None,
) -> np.ndarray:
    """Draw frames from the normalised invariant measure d_*v on V_{n,m}.

    A standard Gaussian n x m matrix is orthonormalised with the sign convention
    that makes the triangular factor's diagonal positive.

    Args:
        gen: numpy random generator.
        n: Ambient dimension.
        m: Frame size.
        size: Number of frames; ``None`` returns a single ``(n, m)`` array.

    Returns:
        Array of shape ``(size, n, m)`` (or ``(n, m)``).
    """
    if not 1 <= m <= n:
        raise DimensionError(f"Haar sampling needs 1 <= m <= n, got n={n}, m={m}")
    shape = (1 if size is None else size, n, m)
    gaussian = gen.standard_normal(shape)
    q, diag = _orthonormalize(gaussian)

    bad = _degenerate_rows(gaussian, diag)
    if np.any(bad):
        logger.debug("Redrawing %d rank-deficient Gaussian matrices", int(bad.sum()))
        redraw = gen.standard_normal((int(bad.sum()), n, m))
        q_new, diag_new = _orthonormalize(redraw)
        if np.any(_degenerate_rows(redraw, diag_new)):
            raise DegenerateSampleError("Gaussian draw stayed rank deficient on retry")
        q[bad] = q_new

    return q[0] if size is None else q


def haar_frame(rng: SeededRng, n: int, m: int) -> Frame:
    """One Haar-distributed frame from the stream ``rng``."""
    return Frame(sample_haar(rng.generator(), n, m))


def polar_decompose(x: np.ndarray) -> tuple[Frame, PosDefMatrix]:
    """Split x = v r^{1/2} with v in V_{n,m} and r = x'x positive definite."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] > x.shape[0]:
        raise DimensionError(f"polar decomposition needs n >= m, got shape {x.shape}")
    left, singular, right_t = np.linalg.svd(x, full_matrices=False)
    if singular[-1] < RANK_TOL * singular[0]:
        raise RankError(
            f"rank(x) < m: smallest singular value {singular[-1]:.3e} "
            f"vs largest {singular[0]:.3e}"
        )
    v = left @ right_t
    r = x.T @ x
    return Frame(v), PosDefMatrix((r + r.T) / 2)


def sqrtm_psd(r: np.ndarray) -> np.ndarray:
    """Symmetric square root of (stacked) positive semidefinite matrices."""
    eigvals, eigvecs = np.linalg.eigh(r)
    roots = np.sqrt(np.clip(eigvals, 0.0, None))
    return (eigvecs * roots[..., None, :]) @ np.swapaxes(eigvecs, -1, -2)


def complement(u: np.ndarray) -> np.ndarray:
    """Orthonormal completion of (stacked) frames: columns spanning {u}^perp."""
    u = np.asarray(u, dtype=float)
    n, k = u.shape[-2:]
    if k >= n:
        raise DimensionError(f"complement needs k < n, got n={n}, k={k}")
    q, _ = np.linalg.qr(u, mode="complete")
    return q[..., k:]


def complement_frame(u: Frame) -> Frame:
    """An (n-k)-frame orthogonal to span(u)."""
    return Frame(complement(u.entries))


def rotation_from_frame(u: Frame) -> Rotation:
    """An orthogonal g_u with g_u [0; I_k] = u."""
    return Rotation(np.concatenate([complement(u.entries), u.entries], axis=1))


def _gram(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """v'u u'v for (stacked) u: (..., n, k) and v: (..., n, m)."""
    cross = np.swapaxes(v, -1, -2) @ u
    return cross @ np.swapaxes(cross, -1, -2)


def _scalar_or_array(values: np.ndarray) -> float | np.ndarray:
    return float(values) if np.ndim(values) == 0 else values


def gram_det_cos(u: FrameLike, v: FrameLike) -> float | np.ndarray:
    """det(v'uu'v), identically 0 when m > k."""
    u_arr, v_arr = as_array(u), as_array(v)
    if u_arr.shape[-2] != v_arr.shape[-2]:
        raise DimensionError("frames must share the ambient dimension n")
    k, m = u_arr.shape[-1], v_arr.shape[-1]
    if m > k:
        batch = np.broadcast_shapes(u_arr.shape[:-2], v_arr.shape[:-2])
        return _scalar_or_array(np.zeros(batch))
    det = np.linalg.det(_gram(u_arr, v_arr))
    return _scalar_or_array(np.clip(det, 0.0, 1.0))


def gram_det_sin(u: FrameLike, v: FrameLike) -> float | np.ndarray:
    """det(I_m - v'uu'v), identically 0 when m > n - k."""
    u_arr, v_arr = as_array(u), as_array(v)
    if u_arr.shape[-2] != v_arr.shape[-2]:
        raise DimensionError("frames must share the ambient dimension n")
    n, k = u_arr.shape[-2:]
    m = v_arr.shape[-1]
    if m > n - k:
        batch = np.broadcast_shapes(u_arr.shape[:-2], v_arr.shape[:-2])
        return _scalar_or_array(np.zeros(batch))
    det = np.linalg.det(np.eye(m) - _gram(u_arr, v_arr))
    return _scalar_or_array(np.clip(det, 0.0, 1.0))


def second_moment(
    rng: SeededRng,
    n: int,
    m: int,
    n_samples: int,
    chunk_size: int = 16_384,
) -> tuple[np.ndarray, np.ndarray]:
    """Entrywise mean and standard error of vv' over Haar draws.

    O(n)-invariance forces E[vv'] = (m/n) I_n.
    """
    total = np.zeros((n, n))
    total_sq = np.zeros((n, n))
    done = 0
    chunk = 0
    while done < n_samples:
        size = min(chunk_size, n_samples - done)
        v = sample_haar(rng.generator(chunk), n, m, size)
        outer = v @ np.swapaxes(v, -1, -2)
        total += outer.sum(axis=0)
        total_sq += (outer**2).sum(axis=0)
        done += size
        chunk += 1
    mean = total / n_samples
    var = (total_sq / n_samples - mean**2) * n_samples / (n_samples - 1)
    return mean, np.sqrt(np.clip(var, 0.0, None) / n_samples)
