"""Shared fixtures for stiefel_transforms tests."""

import json
from pathlib import Path

import numpy as np
import pytest
from typer.testing import CliRunner

from stiefel_transforms.functions import ManifoldFunction, Quadratic, constant
from stiefel_transforms.manifold import haar_frame
from stiefel_transforms.models import Frame, SeededRng


@pytest.fixture
def rng() -> SeededRng:
    """A fixed-seed random stream."""
    return SeededRng(12345)


@pytest.fixture
def sphere_frame() -> Frame:
    """A unit vector in R^3 away from the coordinate axes."""
    v = np.array([[1.0], [2.0], [2.0]]) / 3.0
    return Frame(v)


@pytest.fixture
def frame_4_2() -> Frame:
    """A Haar-distributed 2-frame in R^4."""
    return haar_frame(SeededRng(7), 4, 2)


@pytest.fixture
def frame_5_2() -> Frame:
    """A Haar-distributed 2-frame in R^5."""
    return haar_frame(SeededRng(11), 5, 2)


@pytest.fixture
def const_3_1() -> ManifoldFunction:
    """The constant function 1 on the sphere S^2."""
    return constant(3, 1)


@pytest.fixture
def quad_4_1() -> ManifoldFunction:
    """A smooth invariant function on V_{4,1}."""
    return ManifoldFunction(4, 1, Quadratic.random(4, 3), name="quad:3")


@pytest.fixture
def quad_4_2() -> ManifoldFunction:
    """A smooth invariant function on V_{4,2}."""
    return ManifoldFunction(4, 2, Quadratic.random(4, 5), name="quad:5")


@pytest.fixture
def runner() -> CliRunner:
    """Typer CLI runner."""
    return CliRunner()


@pytest.fixture
def config_file(tmp_path: Path) -> Path:
    """A --config JSON file for the closed-form suite on the sphere."""
    path = tmp_path / "run.json"
    path.write_text(
        json.dumps(
            {
                "n": 3,
                "m": 1,
                "k": 1,
                "alpha": [2.0, 0.0],
                "n_samples": 50000,
                "seed": 3,
                "options": {"suite": "closed-form"},
            }
        )
    )
    return path


@pytest.fixture
def bad_config_file(tmp_path: Path) -> Path:
    """A --config file that is not a JSON object."""
    path = tmp_path / "bad.json"
    path.write_text("[1, 2, 3]")
    return path
