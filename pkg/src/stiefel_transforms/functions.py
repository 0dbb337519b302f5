"""Functions on Stiefel manifolds used as transform inputs."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from stiefel_transforms.errors import DimensionError
from stiefel_transforms.manifold import FrameLike, as_array, sample_haar
from stiefel_transforms.models import SeededRng

INVARIANCE_TOL = 1e-9

# Maps stacked frames (..., n, m) to real values (...).
Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ManifoldFunction:
    """A scalar function on V_{n,m} with declared invariance metadata.

    ``right_o_invariant`` claims f(v gamma) = f(v) for every gamma in O(m); such a
    function descends to the Grassmannian G_{n,m}.
    """

    n: int
    m: int
    evaluator: Evaluator
    right_o_invariant: bool = True
    smooth: bool = True
    name: str = ""

    def __post_init__(self) -> None:
        if not 1 <= self.m <= self.n:
            raise DimensionError(f"need 1 <= m <= n, got n={self.n}, m={self.m}")

    def evaluate_batch(self, v: np.ndarray) -> np.ndarray:
        if v.shape[-2:] != (self.n, self.m):
            raise DimensionError(
                f"{self.name or 'function'} lives on V_{{{self.n},{self.m}}}, "
                f"got frames of shape {v.shape[-2:]}"
            )
        return np.asarray(self.evaluator(v), dtype=float)

    def __call__(self, v: FrameLike) -> float:
        return float(self.evaluate_batch(as_array(v)))


@dataclass(frozen=True)
class Constant:
    value: float = 1.0

    def __call__(self, v: np.ndarray) -> np.ndarray:
        return np.full(v.shape[:-2], self.value)


@dataclass(frozen=True)
class GramPolynomial:
    """det(v'aa'v)^degree with a = [I_m; 0]; a polynomial in the entries of v'a."""

    degree: int

    def __call__(self, v: np.ndarray) -> np.ndarray:
        m = v.shape[-1]
        top = v[..., :m, :]
        return np.linalg.det(top) ** (2 * self.degree)


@dataclass(frozen=True, eq=False)
class Quadratic:
    """tr(A vv') for a fixed symmetric A; smooth and right O(m)-invariant."""

    matrix: np.ndarray = field(repr=False)

    @classmethod
    def random(cls, n: int, seed: int) -> Quadratic:
        raw = np.random.default_rng(seed).standard_normal((n, n))
        return cls((raw + raw.T) / 2)

    def __call__(self, v: np.ndarray) -> np.ndarray:
        return np.einsum("...im,ij,...jm->...", v, self.matrix, v)


@dataclass(frozen=True)
class Entry:
    """The single matrix entry v[row, col]; not right O(m)-invariant for m >= 1."""

    row: int
    col: int

    def __call__(self, v: np.ndarray) -> np.ndarray:
        return v[..., self.row, self.col]


def constant(n: int, m: int, value: float = 1.0) -> ManifoldFunction:
    return ManifoldFunction(n, m, Constant(value), name="const")


def check_right_invariance(
    f: ManifoldFunction,
    rng: SeededRng,
    n_trials: int = 100,
) -> float:
    """Largest |f(v gamma) - f(v)| over random v and gamma in O(m).

    A function flagged ``right_o_invariant`` should stay below INVARIANCE_TOL.
    """
    gen = rng.generator()
    v = sample_haar(gen, f.n, f.m, n_trials)
    gamma = sample_haar(gen, f.m, f.m, n_trials)
    return float(np.max(np.abs(f.evaluate_batch(v @ gamma) - f.evaluate_batch(v))))
