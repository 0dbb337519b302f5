"""Tests for gamma_toolkit module."""

import cmath
import math

import pytest

from stiefel_transforms._lanczos import lanczos_gamma
from stiefel_transforms.errors import DimensionError, ExcludedParamError, PoleError
from stiefel_transforms.gamma_toolkit import (
    bernstein_poly,
    cosine_const,
    delta_norm,
    funk_const,
    log_siegel_gamma,
    multiplier_c,
    reciprocal_siegel_gamma,
    siegel_gamma,
    siegel_gamma_ratio,
    siegel_pole_distance,
    stiefel_volume,
    tilde_delta_norm,
)

BACKEND_GRID = [
    complex(re, im)
    for re in (0.6, 1.3, 2.5, 4.2, 7.0, 10.0)
    for im in (-5.0, -1.1, 0.0, 0.7, 5.0)
]


def polar_points(m: int, bound: float = 10.0) -> list[float]:
    """Poles of Gamma_m with modulus at most ``bound``."""
    if m == 1:
        return [-float(j) for j in range(int(bound) + 1)]
    top = (m - 1) / 2
    return [top - j / 2 for j in range(int(2 * (top + bound)) + 1)]


POLAR_CASES = [(m, p) for m in (1, 2, 3) for p in polar_points(m)]


class TestSiegelGamma:
    """Tests for siegel_gamma function."""

    @pytest.mark.parametrize("a", [0.5, 1.0, 2.5, 3.7])
    def test_rank_one_is_classical_gamma(self, a: float) -> None:
        """Test that Gamma_1 coincides with the classical gamma function."""
        result = siegel_gamma(1, a)
        assert result.value == pytest.approx(math.gamma(a), rel=1e-12)
        assert result.at_pole is False

    def test_rank_two_product_formula(self) -> None:
        """Test that Gamma_2(a) = sqrt(pi) Gamma(a) Gamma(a - 1/2)."""
        a = 2.3
        expected = math.sqrt(math.pi) * math.gamma(a) * math.gamma(a - 0.5)
        assert siegel_gamma(2, a).value == pytest.approx(expected, rel=1e-12)

    def test_rank_two_at_one(self) -> None:
        """Test that Gamma_2(1) = sqrt(pi) Gamma(1) Gamma(1/2) = pi."""
        assert siegel_gamma(2, 1.0).value == pytest.approx(math.pi, rel=1e-12)

    @pytest.mark.parametrize("m", [1, 2, 3])
    @pytest.mark.parametrize("a", BACKEND_GRID)
    def test_lanczos_backend_agrees(self, m: int, a: complex) -> None:
        """Test that the Lanczos backend matches scipy across the strip."""
        scipy_value = siegel_gamma(m, a).value
        lanczos_value = siegel_gamma(m, a, backend="lanczos").value
        assert abs(lanczos_value - scipy_value) <= 1e-12 * abs(scipy_value)

    def test_lanczos_reflection(self) -> None:
        """Test the Lanczos gamma on the left half-plane via reflection."""
        assert lanczos_gamma(-0.5) == pytest.approx(-2 * math.sqrt(math.pi))
        assert lanczos_gamma(0.5) == pytest.approx(math.sqrt(math.pi))

    @pytest.mark.parametrize(("m", "a"), [(1, 0.0), (1, -2.0), (2, 0.5), (3, 1.0)])
    def test_pole_raises_when_strict(self, m: int, a: float) -> None:
        """Test that a pole raises PoleError in strict mode."""
        with pytest.raises(PoleError):
            siegel_gamma(m, a)

    @pytest.mark.parametrize(("m", "p"), POLAR_CASES)
    def test_every_polar_point_flagged(self, m: int, p: float) -> None:
        """Test that each pole of modulus at most 10 is flagged."""
        result = siegel_gamma(m, p, strict=False)
        assert result.at_pole is True
        assert math.isnan(result.value.real)

    def test_pole_flagged_when_not_strict(self) -> None:
        """Test that a non-strict call flags the pole instead of raising."""
        result = siegel_gamma(2, 0.5, strict=False)
        assert result.at_pole is True
        assert math.isnan(result.value.real)
        assert result.pole_distance < 1e-8

    def test_pole_distance(self) -> None:
        """Test the distance to the polar set of Gamma_2."""
        assert siegel_pole_distance(2, 0.75) == pytest.approx(0.25)
        assert siegel_pole_distance(1, 0.75) == pytest.approx(0.75)

    def test_rank_zero_rejected(self) -> None:
        """Test that m = 0 raises DimensionError."""
        with pytest.raises(DimensionError):
            siegel_gamma(0, 1.0)


class TestLogAndReciprocal:
    """Tests for log_siegel_gamma and reciprocal_siegel_gamma functions."""

    def test_log_matches_value(self) -> None:
        """Test that exp(log Gamma_m) recovers Gamma_m."""
        a = 3.1 + 0.4j
        value = siegel_gamma(3, a).value
        log_value = log_siegel_gamma(3, a)
        assert abs(cmath.exp(log_value) - value) <= 1e-10 * abs(value)

    @pytest.mark.parametrize(
        ("m", "a", "expected"),
        [(1, 2.0, 0.0), (2, 1.0, math.log(math.pi)), (1, 10.0, math.log(362880))],
    )
    def test_log_values(self, m: int, a: float, expected: float) -> None:
        """Test log Gamma_m against factorial and product values."""
        assert log_siegel_gamma(m, a) == pytest.approx(expected, abs=1e-12)

    def test_reciprocal_is_zero_at_pole(self) -> None:
        """Test that 1/Gamma_m vanishes on the polar set."""
        assert abs(reciprocal_siegel_gamma(2, 0.5)) < 1e-12
        assert abs(reciprocal_siegel_gamma(1, -3.0)) < 1e-12

    def test_reciprocal_inverts_value(self) -> None:
        """Test that reciprocal times value is one away from poles."""
        a = 2.2 - 0.3j
        product = reciprocal_siegel_gamma(2, a) * siegel_gamma(2, a).value
        assert product == pytest.approx(1.0, rel=1e-12)

    def test_ratio_with_denominator_pole_is_zero(self) -> None:
        """Test that a pole in the denominator makes the ratio vanish."""
        assert siegel_gamma_ratio(1, [1.5], [0.0]) == 0


class TestStiefelVolume:
    """Tests for stiefel_volume function."""

    def test_sphere_area(self) -> None:
        """Test that V_{3,1} has the area of the unit sphere S^2."""
        assert stiefel_volume(3, 1) == pytest.approx(4 * math.pi, rel=1e-12)

    def test_orthogonal_group(self) -> None:
        """Test that V_{2,2} = O(2) has volume 4 pi."""
        assert stiefel_volume(2, 2) == pytest.approx(4 * math.pi, rel=1e-12)

    @pytest.mark.parametrize(
        ("n", "m", "expected"),
        [(2, 1, 2 * math.pi), (3, 1, 4 * math.pi), (4, 2, 8 * math.pi**3)],
    )
    def test_volume_values(self, n: int, m: int, expected: float) -> None:
        """Test the circle, the sphere S^2 and V_{4,2}."""
        assert stiefel_volume(n, m) == pytest.approx(expected, rel=1e-12)

    def test_invalid_dimensions(self) -> None:
        """Test that m > n raises DimensionError."""
        with pytest.raises(DimensionError):
            stiefel_volume(2, 3)


class TestBernsteinPoly:
    """Tests for bernstein_poly function."""

    def test_order_zero_is_one(self) -> None:
        """Test that B_0 is identically one."""
        assert bernstein_poly(0, 2, 5, 1.7 + 0.2j) == 1

    def test_rank_one_order_one(self) -> None:
        """Test that B_{1,1,n}(a) = a (a - n + 2)."""
        a = 2.5 + 0.5j
        assert bernstein_poly(1, 1, 4, a) == pytest.approx(a * (a - 2))

    @pytest.mark.parametrize("a", [1.5, 2.5 + 0.5j, 4.0])
    def test_rank_one_order_one_sphere(self, a: complex) -> None:
        """Test that B_{1,1,3}(a) = a (a - 1)."""
        assert bernstein_poly(1, 1, 3, a) == pytest.approx(a * (a - 1))

    @pytest.mark.parametrize("k", [3, 4, 5])
    def test_rank_two_order_one(self, k: int) -> None:
        """Test that B_{1,2,k}(a) = a (a - k + 2)(a - 1)(a - k + 3)."""
        a = 2.7 + 0.3j
        expected = a * (a - k + 2) * (a - 1) * (a - k + 3)
        assert bernstein_poly(1, 2, k, a) == pytest.approx(expected)

    def test_vanishes_at_zero(self) -> None:
        """Test that the Bernstein polynomial has a root at a = 0."""
        assert bernstein_poly(1, 2, 5, 0.0) == 0

    def test_negative_order_rejected(self) -> None:
        """Test that a negative order raises ValueError."""
        with pytest.raises(ValueError, match="non-negative"):
            bernstein_poly(-1, 1, 3, 1.0)


class TestClosedForms:
    """Tests for funk_const, cosine_const and the normalisation factors."""

    def test_funk_const_sphere(self) -> None:
        """Test c_{1,1} on S^2."""
        assert funk_const(3, 1, 1) == pytest.approx(0.5, rel=1e-12)

    @pytest.mark.parametrize(
        ("n", "m", "k", "expected"),
        [(3, 1, 1, 0.5), (4, 1, 2, 1.0), (4, 2, 2, 1 / (2 * math.pi))],
    )
    def test_funk_const_values(
        self, n: int, m: int, k: int, expected: float
    ) -> None:
        """Test c_{k,m} on S^2, S^3 and V_{4,2}."""
        assert funk_const(n, m, k) == pytest.approx(expected, rel=1e-12)

    def test_funk_const_needs_room(self) -> None:
        """Test that k < m raises DimensionError."""
        with pytest.raises(DimensionError):
            funk_const(5, 2, 1)

    @pytest.mark.parametrize(("n", "m", "k"), [(3, 1, 1), (4, 2, 3), (5, 2, 2)])
    def test_cosine_const_is_one_at_k(self, n: int, m: int, k: int) -> None:
        """Test that the transform of 1 equals 1 when alpha = k."""
        assert cosine_const(n, m, k, float(k)) == pytest.approx(1.0, rel=1e-12)

    def test_cosine_const_sphere(self) -> None:
        """Test the value on S^2 with k = 1 and alpha = 2."""
        assert cosine_const(3, 1, 1, 2.0) == pytest.approx(0.5, rel=1e-12)

    def test_cosine_const_rank_two(self) -> None:
        """Test the closed form on V_{4,2} at alpha = 3 against Gamma_2 products."""

        def gamma_2(a: float) -> float:
            return math.sqrt(math.pi) * math.gamma(a) * math.gamma(a - 0.5)

        expected = gamma_2(2) * gamma_2(1.5) / (gamma_2(1) * gamma_2(2.5))
        assert cosine_const(4, 2, 2, 3.0) == pytest.approx(expected, rel=1e-12)

    def test_cosine_const_pole(self) -> None:
        """Test that a pole of Gamma_m(alpha/2) raises PoleError."""
        with pytest.raises(PoleError):
            cosine_const(4, 2, 2, 1.0)

    def test_cosine_const_dimension_range(self) -> None:
        """Test that k < m raises DimensionError."""
        with pytest.raises(DimensionError):
            cosine_const(4, 2, 1, 2.5)

    @pytest.mark.parametrize(
        ("m", "a"),
        [(1, 1.0), (1, 2.0), (1, 3.0), (1, 4.0), (2, 2.0), (2, 3.0 + 1e-10j)],
    )
    def test_delta_norm_excluded(self, m: int, a: complex) -> None:
        """Test that every positive integer alpha is excluded."""
        with pytest.raises(ExcludedParamError):
            delta_norm(3, m, a)

    def test_delta_norm_value(self) -> None:
        """Test (Gamma(1/2)/Gamma(3/2)) (Gamma(1/4)/Gamma(1/4)) = 2 on S^2."""
        assert delta_norm(3, 1, 0.5) == pytest.approx(2.0, rel=1e-12)

    @pytest.mark.parametrize("a", [0.5, 1.5 + 0.2j, -2.0])
    def test_delta_norm_defined_off_integers(self, a: complex) -> None:
        """Test that non-integer and non-positive alpha are allowed."""
        assert math.isfinite(abs(delta_norm(4, 1, a)))

    def test_tilde_delta_matches_delta(self) -> None:
        """Test the lambda-notation shift of the normalisation factor."""
        lam = 0.3 + 0.2j
        expected = delta_norm(4, 1, lam + 1 - 2)
        assert tilde_delta_norm(4, 1, lam) == pytest.approx(expected, rel=1e-12)


class TestMultiplierC:
    """Tests for multiplier_c function."""

    def test_odd_degree_vanishes(self) -> None:
        """Test that odd degrees have multiplier zero."""
        assert multiplier_c(3, 1.25, 3) == 0

    def test_degree_zero_at_lambda_zero(self) -> None:
        """Test that lambda = 0 gives the identity on constants."""
        assert multiplier_c(0, 0.0, 4) == pytest.approx(1.0)

    def test_degree_two_value(self) -> None:
        """Test c_{2,1} on S^2 = -Gamma(1.25)/Gamma(2.25)."""
        expected = -math.gamma(1.25) / math.gamma(2.25)
        assert multiplier_c(2, 1.0, 3) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("lam", [0.5, 1.0, 2.0 + 1.0j])
    def test_stirling_ratio(self, lam: complex) -> None:
        """Test |c_400| / |c_402| against (201/200)^{Re lambda}."""
        ratio = abs(multiplier_c(400, lam, 3)) / abs(multiplier_c(402, lam, 3))
        expected = (201 / 200) ** complex(lam).real
        assert ratio == pytest.approx(expected, rel=1e-3)

    def test_sign_alternates(self) -> None:
        """Test the (-1)^{j/2} sign for real lambda."""
        assert multiplier_c(2, 0.5, 3).real < 0
        assert multiplier_c(4, 0.5, 3).real > 0

    @pytest.mark.parametrize("lam", [0.3, 1.2, 0.5 + 0.5j])
    def test_inverse_pair(self, lam: complex) -> None:
        """Test that c_{j,lambda} c_{j,-lambda} = 1."""
        for j in range(0, 20, 2):
            product = multiplier_c(j, lam, 3) * multiplier_c(j, -lam, 3)
            assert product == pytest.approx(1.0, rel=1e-10)

    def test_top_pole_raises(self) -> None:
        """Test that a pole of the numerator raises PoleError."""
        with pytest.raises(PoleError):
            multiplier_c(0, 1.5, 3)

    def test_bottom_pole_is_zero(self) -> None:
        """Test that a pole of the denominator gives zero."""
        assert multiplier_c(0, -1.5, 3) == 0

    def test_negative_degree_rejected(self) -> None:
        """Test that a negative degree raises ValueError."""
        with pytest.raises(ValueError):
            multiplier_c(-2, 1.0, 3)
