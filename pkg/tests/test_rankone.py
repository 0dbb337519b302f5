"""Tests for rankone module."""

import math

import numpy as np
import pytest
from scipy import special

from stiefel_transforms.errors import (
    ConvergenceDomainError,
    DimensionError,
    ExcludedParamError,
    QuadratureDegreeError,
)
from stiefel_transforms.functions import constant
from stiefel_transforms.gamma_toolkit import funk_const, multiplier_c
from stiefel_transforms.models import Frame, SeededRng
from stiefel_transforms.rankone import (
    ZonalFunction,
    composition_identity_check,
    cos_lambda_multiplier_mc,
    cos_lambda_transform,
    expand_zonal,
    funk_limit_multiplier,
    funk_multiplier_check,
    funk_multiplier_mc,
    gegenbauer,
    multiplier_decay_check,
    multiplier_table,
    rank_one_alpha,
    unnormalized_multiplier,
    zonal_eigen_residual,
)

N_SIGMA = 5


@pytest.fixture
def tilted_point() -> Frame:
    """A unit vector in R^3 at angle pi/7 from the north pole."""
    angle = math.pi / 7
    return Frame(np.array([[math.sin(angle)], [0.0], [math.cos(angle)]]))


class TestGegenbauer:
    """Tests for gegenbauer function."""

    @pytest.mark.parametrize("order", [0.5, 1.0, 1.5])
    def test_matches_scipy(self, order: float) -> None:
        """Test the recurrence against scipy's Gegenbauer polynomials."""
        t = np.linspace(-1, 1, 11)
        for j in range(9):
            expected = special.eval_gegenbauer(j, order, t)
            assert np.allclose(gegenbauer(j, order, t), expected, atol=1e-12)

    def test_scalar_input(self) -> None:
        """Test that a scalar argument returns a float."""
        value = gegenbauer(2, 0.5, 0.0)
        assert isinstance(value, float)
        assert value == pytest.approx(-0.5)

    def test_negative_degree(self) -> None:
        """Test that a negative degree raises ValueError."""
        with pytest.raises(ValueError):
            gegenbauer(-1, 0.5, 0.0)


class TestZonalFunction:
    """Tests for ZonalFunction and expand_zonal."""

    @pytest.mark.parametrize(("n", "j"), [(3, 2), (3, 4), (4, 3), (5, 2)])
    def test_eigenfunction(self, n: int, j: int) -> None:
        """Test that zonal harmonics solve the Laplace-Beltrami eigen-equation."""
        assert zonal_eigen_residual(ZonalFunction(n, j)) < 1e-3

    def test_circle_rejected(self) -> None:
        """Test that n < 3 raises DimensionError."""
        with pytest.raises(DimensionError):
            ZonalFunction(2, 1)

    def test_axis_must_be_unit(self) -> None:
        """Test that a non-unit axis raises DimensionError."""
        with pytest.raises(DimensionError, match="unit vector"):
            ZonalFunction(3, 2, axis=np.array([1.0, 1.0, 0.0]))

    def test_invariance_flag_follows_parity(self) -> None:
        """Test that only even degrees are flagged O(1)-invariant."""
        assert ZonalFunction(3, 2).as_function().right_o_invariant is True
        assert ZonalFunction(3, 3).as_function().right_o_invariant is False

    def test_expansion_of_polynomial(self) -> None:
        """Test that t^2 expands into degrees 0 and 2 only."""
        expansion, error = expand_zonal(lambda t: t**2, 3, 6)
        assert error < 1e-12
        assert np.allclose(expansion.coefficients[[1, 3, 4, 5, 6]], 0, atol=1e-12)
        # t^2 = (2 P_2 + 1) / 3
        assert expansion.coefficients[0] == pytest.approx(1 / 3)
        assert expansion.coefficients[2] == pytest.approx(2 / 3)

    def test_too_few_nodes(self) -> None:
        """Test that fewer than 2J + 1 nodes raise QuadratureDegreeError."""
        with pytest.raises(QuadratureDegreeError):
            expand_zonal(lambda t: t, 3, 10, n_nodes=15)


class TestCosLambda:
    """Tests for cos_lambda_transform and the empirical multipliers."""

    def test_rank_one_alpha(self) -> None:
        """Test alpha = lambda + 1 - rho."""
        assert rank_one_alpha(2.0, 4) == pytest.approx(1.0)

    @pytest.mark.parametrize(("lam", "n"), [(2.0, 3), (1.5, 4), (2.0 + 0.5j, 3)])
    def test_unnormalized_degree_zero(self, lam: complex, n: int) -> None:
        """Test that the raw kernel integrates 1 to E|t|^{lambda - rho}."""
        s = lam - n / 2
        expected = (
            special.gamma(n / 2)
            * special.gamma((s + 1) / 2)
            / (math.sqrt(math.pi) * special.gamma((n + s) / 2))
        )
        assert unnormalized_multiplier(0, lam, n) == pytest.approx(expected)

    @pytest.mark.parametrize(("j", "lam"), [(0, 2.0), (2, 2.0), (2, 1.25 + 0.5j)])
    def test_multiplier_matches_formula(self, j: int, lam: complex) -> None:
        """Test the empirical multiplier against c_{j,lambda} on S^2."""
        estimate = cos_lambda_multiplier_mc(j, lam, 3, 100000, SeededRng(21))
        assert estimate.sigma_distance(multiplier_c(j, lam, 3)) < N_SIGMA

    def test_odd_degree_annihilated(self) -> None:
        """Test that an odd zonal harmonic has multiplier near zero."""
        estimate = cos_lambda_multiplier_mc(3, 2.0, 3, 50000, SeededRng(22))
        assert estimate.sigma_distance(0.0) < N_SIGMA

    def test_vanishing_point(self) -> None:
        """Test that a point where Y_j vanishes raises ValueError."""
        equator = Frame(np.array([[1.0], [0.0], [0.0]]))
        with pytest.raises(ValueError, match="vanishes"):
            cos_lambda_multiplier_mc(1, 2.0, 3, 100, SeededRng(0), point=equator)

    def test_below_convergence(self, tilted_point: Frame) -> None:
        """Test that Re lambda <= rho - 1 raises ConvergenceDomainError."""
        with pytest.raises(ConvergenceDomainError):
            cos_lambda_transform(constant(3, 1), tilted_point, 0.5, 100, SeededRng(0))

    def test_sphere_only(self, frame_4_2: Frame) -> None:
        """Test that m != 1 raises DimensionError."""
        with pytest.raises(DimensionError, match="m = 1"):
            cos_lambda_transform(constant(4, 2), frame_4_2, 2.0, 100, SeededRng(0))

    def test_table_passes(self) -> None:
        """Test a small multiplier table on S^2."""
        report = multiplier_table(range(3), [2.0], 3, 50000, SeededRng(23))
        assert report.check == "multiplier"
        assert len(report.rows) == 3
        assert report.passed is True


class TestComposition:
    """Tests for composition_identity_check and multiplier_decay_check."""

    def test_composition_is_identity(self) -> None:
        """Test that c_{j,lambda} c_{j,-lambda} = 1 on even degrees."""
        report = composition_identity_check(40, [0.3, 1.2, 0.5 + 0.5j], 3)
        assert report.passed is True
        assert report.statistic < 1e-10
        assert all(row.j % 2 == 0 for row in report.rows)

    def test_excluded_lambda(self) -> None:
        """Test that lambda + 1 - rho in {1, 2, ...} is excluded."""
        with pytest.raises(ExcludedParamError):
            composition_identity_check(10, [1.5], 3)

    @pytest.mark.parametrize("lam", [1.0, 0.0, 2.0 + 1.0j])
    def test_decay_slope(self, lam: complex) -> None:
        """Test that log|c_{j,lambda}| decays with slope -Re lambda."""
        report = multiplier_decay_check(lam, 400)
        assert report.statistic == pytest.approx(-complex(lam).real, abs=0.05)
        assert report.passed is True

    def test_decay_needs_two_degrees(self) -> None:
        """Test that j_max too small to fit raises ValueError."""
        with pytest.raises(ValueError, match="fewer than two"):
            multiplier_decay_check(1.0, 2)


class TestFunkLimit:
    """Tests for the pole-cancelled Funk limit of Cos^lambda."""

    def test_degree_zero_is_funk_constant(self) -> None:
        """Test that the limit multiplier on constants is c_{1,1}."""
        for n in (3, 4, 5):
            assert funk_limit_multiplier(0, n) == pytest.approx(funk_const(n, 1, 1))

    def test_odd_degree(self) -> None:
        """Test that odd degrees have limit multiplier zero."""
        assert funk_limit_multiplier(3, 4) == 0.0

    def test_axis_is_exact(self) -> None:
        """Test that at the axis the Funk multiplier is P_2(0) with zero error."""
        estimate = funk_multiplier_mc(2, 3, 1000, SeededRng(0))
        assert estimate.value.real == pytest.approx(-0.5, abs=1e-12)
        assert estimate.stderr < 1e-12

    def test_tilted_point(self, tilted_point: Frame) -> None:
        """Test the limit against c_{1,1} times Funk away from the axis."""
        report = funk_multiplier_check(2, 3, 50000, SeededRng(24), point=tilted_point)
        assert report.check == "funk"
        assert report.passed is True

    def test_odd_degree_rejected(self) -> None:
        """Test that odd degrees raise ValueError."""
        with pytest.raises(ValueError, match="even degrees"):
            funk_multiplier_check(1, 3, 100, SeededRng(0))
