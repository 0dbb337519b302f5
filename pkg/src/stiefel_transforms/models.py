"""Data models for stiefel_transforms."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np

from stiefel_transforms.errors import ConfigError, DimensionError, RankError

FRAME_TOL = 1e-10
SYMMETRY_TOL = 1e-12

TransformKind = Literal[
    "cosine",
    "dual_cosine",
    "sine",
    "dual_sine",
    "funk",
    "dual_funk",
    "M",
    "Q",
    "M_normalized",
]
TRANSFORM_KINDS: tuple[str, ...] = (
    "cosine",
    "dual_cosine",
    "sine",
    "dual_sine",
    "funk",
    "dual_funk",
    "M",
    "Q",
    "M_normalized",
)


def _frozen_array(entries: np.ndarray) -> np.ndarray:
    arr = np.array(entries, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ComplexParam:
    """The complex transform parameter (alpha, or lambda in rank one)."""

    value: complex

    def __post_init__(self) -> None:
        value = complex(self.value)
        if not cmath.isfinite(value):
            raise ValueError(f"parameter must be finite, got {self.value!r}")
        object.__setattr__(self, "value", value)

    @classmethod
    def coerce(cls, a: ComplexParam | complex | float | list | tuple) -> ComplexParam:
        """Accept a ComplexParam, a number, or a ``[re, im]`` pair."""
        if isinstance(a, ComplexParam):
            return a
        if isinstance(a, (list, tuple)):
            re, im = a
            return cls(complex(re, im))
        return cls(complex(a))

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag(self) -> float:
        return self.value.imag

    def shifted(self, delta: complex) -> ComplexParam:
        return ComplexParam(self.value + delta)


@dataclass(frozen=True)
class GammaEvalResult:
    """Value of a gamma-type function together with its pole diagnostics."""

    value: complex
    at_pole: bool
    pole_distance: float


@dataclass(frozen=True, eq=False)
class Frame:
    """An n x m matrix with orthonormal columns, a point of V_{n,m}."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen_array(self.entries)
        if arr.ndim != 2:
            raise DimensionError(f"frame must be a 2-D matrix, got shape {arr.shape}")
        n, m = arr.shape
        if not 1 <= m <= n:
            raise DimensionError(f"frame needs 1 <= m <= n, got n={n}, m={m}")
        defect = np.max(np.abs(arr.T @ arr - np.eye(m)))
        if defect > FRAME_TOL:
            raise DimensionError(f"columns are not orthonormal (defect {defect:.2e})")
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def m(self) -> int:
        return self.entries.shape[1]

    @classmethod
    def standard(cls, n: int, k: int, *, lower: bool = True) -> Frame:
        """The frame [0; I_k] (``lower``) or [I_k; 0]."""
        entries = np.zeros((n, k))
        if lower:
            entries[n - k :, :] = np.eye(k)
        else:
            entries[:k, :] = np.eye(k)
        return cls(entries)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "entries": self.entries.reshape(-1).tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> Frame:
        n, m = int(data["n"]), int(data["m"])
        entries = np.asarray(data["entries"], dtype=float)
        if entries.size != n * m:
            raise DimensionError(
                f"frame has {entries.size} entries, expected n*m = {n * m}"
            )
        return cls(entries.reshape(n, m))


@dataclass(frozen=True, eq=False)
class Rotation:
    """An orthogonal n x n matrix."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen_array(self.entries)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"rotation must be square, got shape {arr.shape}")
        defect = np.max(np.abs(arr.T @ arr - np.eye(arr.shape[0])))
        if defect > FRAME_TOL:
            raise DimensionError(f"matrix is not orthogonal (defect {defect:.2e})")
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def apply(self, frame: Frame) -> Frame:
        return Frame(self.entries @ frame.entries)


@dataclass(frozen=True, eq=False)
class PosDefMatrix:
    """A symmetric positive definite m x m matrix."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen_array(self.entries)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"matrix must be square, got shape {arr.shape}")
        scale = max(1.0, float(np.max(np.abs(arr))))
        if np.max(np.abs(arr - arr.T)) > SYMMETRY_TOL * scale:
            raise DimensionError("matrix is not symmetric")
        if np.min(np.linalg.eigvalsh(arr)) <= 0:
            raise RankError("matrix is not positive definite")
        object.__setattr__(self, "entries", arr)

    @property
    def m(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class MatrixSpacePoint:
    """A point x of the matrix space M_{n,m}."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen_array(self.entries)
        if arr.ndim != 2:
            raise DimensionError(f"point must be a 2-D matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("matrix-space point has non-finite entries")
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def m(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class SeededRng:
    """A reproducible random stream addressed by (seed, stream, path).

    Chunk ``i`` of the stream always draws from
    ``SeedSequence(seed, spawn_key=(stream, *path, i))``.
    """

    seed: int
    stream: int = 0
    path: tuple[int, ...] = ()

    def child(self, index: int) -> SeededRng:
        return SeededRng(self.seed, self.stream, (*self.path, index))

    def spawn_key(self, chunk: int) -> tuple[int, ...]:
        return (self.stream, *self.path, chunk)

    def generator(self, chunk: int = 0) -> np.random.Generator:
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.spawn_key(chunk))
        return np.random.default_rng(sequence)


@dataclass(frozen=True)
class MCEstimate:
    """A Monte Carlo value with its standard error."""

    value: complex
    stderr: float
    n_samples: int
    n_rejected: int = 0
    degenerate: bool = False

    def scaled(self, factor: complex) -> MCEstimate:
        return MCEstimate(
            value=self.value * factor,
            stderr=self.stderr * abs(factor),
            n_samples=self.n_samples,
            n_rejected=self.n_rejected,
            degenerate=self.degenerate,
        )

    def sigma_distance(self, reference: complex) -> float:
        """Distance to ``reference`` in units of the standard error."""
        diff = abs(self.value - reference)
        if self.stderr == 0:
            return 0.0 if diff == 0 else math.inf
        return diff / self.stderr


@dataclass(frozen=True)
class Residual:
    """Difference of the two sides of an identity."""

    value: complex
    stderr: float
    lhs: MCEstimate | None = None
    rhs: MCEstimate | None = None
    pathwise_max: float | None = None

    @property
    def sigma(self) -> float:
        if self.stderr == 0:
            return 0.0 if self.value == 0 else math.inf
        return abs(self.value) / self.stderr


@dataclass(frozen=True)
class LimitResult:
    """An extrapolated Monte Carlo limit next to its analytic value."""

    estimate: MCEstimate
    reference: complex

    @property
    def relative_error(self) -> float:
        return abs(self.estimate.value - self.reference) / abs(self.reference)


@dataclass(frozen=True)
class TransformRequest:
    """One transform evaluation, as consumed by the ``transform`` command."""

    kind: TransformKind
    n: int
    m: int
    k: int
    alpha: complex | None = None
    n_samples: int = 100_000
    seed: int = 0
    function: str = "const"

    def __post_init__(self) -> None:
        if self.kind not in TRANSFORM_KINDS:
            raise ConfigError("kind", f"unknown transform kind {self.kind!r}")
        if self.n_samples < 2:
            raise ConfigError("n_samples", "at least two samples are required")


@dataclass
class CheckRecord:
    """Outcome of a single identity check."""

    name: str
    identity: str
    value: complex
    reference: complex
    passed: bool
    stderr: float | None = None
    sigma: float | None = None
    tolerance: float | None = None
    n: int | None = None
    m: int | None = None
    k: int | None = None
    alpha: complex | None = None


@dataclass
class MultiplierRow:
    """A rank-one multiplier: formula value against a measured one."""

    j: int
    lam: complex | None
    formula: complex
    value: complex
    stderr: float | None = None
    passed: bool = True


@dataclass
class MultiplierReport:
    """Rows of a rank-one check with its summary statistic.

    ``statistic`` is the worst sigma distance (multiplier), the largest
    deviation (compose, funk) or the fitted slope (decay).
    """

    check: str
    n: int
    rows: list[MultiplierRow]
    statistic: float
    passed: bool
    notes: list[str] = field(default_factory=list)


@dataclass
class SuiteReport:
    """Records produced by one suite run."""

    suite: str
    seed: int
    created: str
    records: list[CheckRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if not r.passed]


@dataclass
class RunConfig:
    """Validated configuration of a CLI run."""

    command: Literal["transform", "identity", "table", "zeta", "rankone", "sample"]
    n: int | None = None
    m: int | None = None
    k: int | None = None
    alpha: complex | None = None
    n_samples: int | None = None
    seed: int = 0
    output: Path | None = None
    format: Literal["json", "csv"] = "json"
    workers: int = 1
    options: dict = field(default_factory=dict)
