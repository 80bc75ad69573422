"""Tests for ionphonon.analysis.fitting module."""
import numpy as np
import pytest

from ionphonon.analysis.fitting import (
    FitKind,
    compare_decay_models,
    decaying_window,
    default_window,
    extrapolate_critical_point,
    fit_exponential,
    fit_luttinger_coefficient,
    fit_power_law,
)
from ionphonon.core.errors import (
    FitError,
    InvalidInputError,
    InvalidRegimeError,
    NonPositiveDataError,
    NotDecayingError,
)

R = np.arange(1, 21, dtype=float)


class TestDecayFits:
    """Power-law and exponential fits on a window of separations."""

    def test_power_law_recovery(self):
        # Given: Noise-free power-law data
        values = 3.0 * R ** -0.7

        # When
        result = fit_power_law(R, values, (2, 12))

        # Then
        assert result.kind is FitKind.POWER_LAW
        assert result.value("alpha") == pytest.approx(0.7, abs=1e-10)
        assert result.r_squared == pytest.approx(1.0)
        assert result.window == (2.0, 12.0)

    def test_exponential_recovery(self):
        values = 2.0 * np.exp(-R / 2.5)

        result = fit_exponential(R, values, (2, 10))

        assert result.value("xi") == pytest.approx(2.5, abs=1e-10)
        assert result.errors["xi"] == pytest.approx(0.0, abs=1e-8)

    def test_non_positive_values_are_named(self):
        # Given: A zero inside the window
        values = R ** -1.0
        values[4] = 0.0

        # When / Then: The separation is reported
        with pytest.raises(NonPositiveDataError) as exc_info:
            fit_power_law(R, values, (2, 10))
        assert exc_info.value.separations == [5.0]

    def test_growing_data_is_not_decaying(self):
        with pytest.raises(NotDecayingError):
            fit_exponential(R, np.exp(R / 3.0), (2, 10))

    def test_too_few_points(self):
        with pytest.raises(FitError, match="need 4"):
            fit_power_law(R, R ** -1.0, (2, 4))

    def test_window_outside_data(self):
        with pytest.raises(InvalidInputError):
            fit_power_law(R, R ** -1.0, (30, 40))

    def test_to_dict(self):
        record = fit_power_law(R, R ** -1.0, (2, 12)).to_dict()

        assert record["kind"] == "power_law"
        assert record["window"] == [2.0, 12.0]
        assert "extras" not in record


class TestWindowsAndComparison:
    """Default windows and the decay-model comparison."""

    def test_default_windows(self):
        assert default_window(FitKind.POWER_LAW, 50) == (2, 12)
        assert default_window("exponential", 50) == (2, 16)

    def test_no_default_window_for_sweep_fits(self):
        with pytest.raises(InvalidInputError):
            default_window(FitKind.LUTTINGER_SCALING, 50)

    def test_power_law_data_prefers_power_law(self):
        results = compare_decay_models(R, R ** -0.5, (2, 12))

        assert results["preferred"] == "power_law"
        assert results["exponential"] is not None

    def test_exponential_data_prefers_exponential(self):
        results = compare_decay_models(R, np.exp(-R / 3.0), (2, 12))

        assert results["preferred"] == "exponential"

    def test_rejected_fits_are_none(self):
        # Given: Growing data, which neither model accepts as a decay
        results = compare_decay_models(R, np.exp(R / 3.0), (2, 12))

        assert results["exponential"] is None
        assert results["preferred"] == "power_law"


class TestDecayingWindow:
    """Exponential windows end where |C| stops falling."""

    def test_monotone_profile_keeps_the_window(self):
        assert decaying_window(R, np.exp(-R / 2), (2, 10)) == (2.0, 10.0)

    def test_staggered_signs_are_not_nodes(self):
        # Given: A decay whose sign alternates from site to site
        values = (-1.0) ** R * np.exp(-R)

        assert decaying_window(R, values, (1, 8)) == (1.0, 8.0)

    def test_window_ends_before_a_node(self):
        # Given: Signed values crossing zero between r = 5 and r = 6
        r = np.arange(1, 9, dtype=float)
        values = [-0.30, -0.11, -0.04, -0.012, -0.001, 0.002, 0.0015, 0.001]

        # When
        window = decaying_window(r, values, (1, 8))

        # Then: The dip at r = 5 is dropped with everything after it
        assert window == (1.0, 4.0)

    def test_rise_without_sign_change(self):
        r = np.arange(1, 9, dtype=float)
        values = [0.3, 0.1, 0.03, 0.02, 0.025, 0.02, 0.015, 0.01]

        assert decaying_window(r, values, (1, 8)) == (1.0, 3.0)

    def test_clipped_window_feeds_the_fit(self):
        # Given: exp(-r / 1.5) up to r = 6, then a tail that rises past the dip
        values = np.where(R <= 6, np.exp(-R / 1.5), 1e-4 * (R - 6))

        # When
        result = fit_exponential(R, values, decaying_window(R, values, (1, 12)))

        # Then
        assert result.value("xi") == pytest.approx(1.5, abs=1e-10)
        assert result.window[1] <= 6.0


class TestCriticalPoint:
    """Linear extrapolation of 1/xi to zero."""

    U = np.array([2.0, 2.5, 3.0, 3.5, 4.0])

    def test_exact_line(self):
        # Given: 1/xi = 0.5 (U - 1.5)
        xi = 1.0 / (0.5 * (self.U - 1.5))

        # When
        result = extrapolate_critical_point(self.U, xi)

        # Then
        assert result.value("u_c") == pytest.approx(1.5, abs=1e-10)
        assert result.value("slope") == pytest.approx(0.5)
        assert result.errors["u_c"] == pytest.approx(0.0, abs=1e-8)

    def test_unsorted_input(self):
        xi = 1.0 / (0.5 * (self.U - 1.5))

        result = extrapolate_critical_point(self.U[::-1], xi[::-1])

        assert result.value("u_c") == pytest.approx(1.5, abs=1e-10)

    def test_auto_drops_points_below_the_linear_regime(self):
        # Given: A first point far from the line
        u = np.concatenate([[1.0], self.U])
        xi = np.concatenate([[0.5], 1.0 / (0.5 * (self.U - 1.5))])

        # When
        result = extrapolate_critical_point(u, xi, auto=True)

        # Then
        assert result.extras["points_used"] == 5
        assert result.value("u_c") == pytest.approx(1.5, abs=1e-8)

    def test_range_restriction(self):
        u = np.concatenate([[1.0], self.U])
        xi = np.concatenate([[0.5], 1.0 / (0.5 * (self.U - 1.5))])

        result = extrapolate_critical_point(u, xi, u_range=(2.0, 4.0))

        assert result.value("u_c") == pytest.approx(1.5, abs=1e-8)

    def test_shrinking_gap_is_wrong_regime(self):
        # Given: xi grows with U
        with pytest.raises(InvalidRegimeError):
            extrapolate_critical_point(self.U, self.U)

    def test_needs_three_points(self):
        with pytest.raises(FitError):
            extrapolate_critical_point([2.0, 3.0], [1.0, 0.5])

    def test_rejects_non_positive_lengths(self):
        with pytest.raises(InvalidInputError):
            extrapolate_critical_point(self.U, [1.0, 0.5, 0.0, 0.3, 0.2])


class TestLuttingerScaling:
    """alpha = A sqrt(U / (t n0))."""

    def test_coefficient_recovery(self):
        # Given: Exact scaling with A = 1.68 at unit filling
        u = np.array([1.0, 2.0, 4.0, 8.0])
        series = list(zip(u, 1.68 * np.sqrt(u)))

        # When
        result = fit_luttinger_coefficient(series, n0=1.0)

        # Then
        assert result.value("A") == pytest.approx(1.68)
        assert result.errors["A"] == pytest.approx(0.0, abs=1e-12)
        assert result.r_squared == pytest.approx(1.0)

    def test_filling_enters_the_scale(self):
        u = np.array([1.0, 2.0, 4.0])
        series = list(zip(u, 1.2 * np.sqrt(u / 2.0)))

        assert fit_luttinger_coefficient(series, n0=2.0).value("A") == pytest.approx(1.2)

    def test_too_few_pairs(self):
        with pytest.raises(FitError):
            fit_luttinger_coefficient([(1.0, 1.0), (2.0, 1.4)], n0=1.0)

    @pytest.mark.parametrize("series,n0", [
        ([], 1.0),
        ([(1.0, 1.0), (2.0, 1.4), (3.0, 1.7)], 0.0),
        ([(-1.0, 1.0), (2.0, 1.4), (3.0, 1.7)], 1.0),
    ])
    def test_invalid_input(self, series, n0):
        with pytest.raises(InvalidInputError):
            fit_luttinger_coefficient(series, n0=n0)
