"""Tests for curve representation and accessors."""

from datetime import date

import numpy as np
import pytest

from tests.curves import VALUATION, flat_curve, sloped_curve
from yieldspline.curve import (
    Curve,
    CurveError,
    DateGrid,
    PiecewiseCubic,
    ZeroCurve,
    discount,
    discrete_forward_cc,
    discrete_forward_simple,
    sample,
    shift_polynomial,
    year_fraction,
    zero_rate,
)
from yieldspline.forward import forward_curve_from_zero_values
from yieldspline.interpolation import Scheme, hermite_coefficients


class TestDateGrid:
    def test_valid_grid(self):
        grid = DateGrid(np.array([0.0, 0.5, 1.2]))
        assert len(grid) == 3
        assert grid.n_intervals == 2
        np.testing.assert_allclose(grid.spacing, [0.5, 0.7])

    def test_rejects_unsorted(self):
        """Non-increasing times are rejected."""
        with pytest.raises(CurveError):
            DateGrid(np.array([0.0, 1.0, 1.0]))

    def test_rejects_negative_start(self):
        with pytest.raises(CurveError):
            DateGrid(np.array([-0.1, 1.0]))

    def test_rejects_nan(self):
        with pytest.raises(CurveError):
            DateGrid(np.array([0.0, np.nan]))

    def test_times_are_read_only(self):
        grid = DateGrid(np.array([0.0, 1.0]))
        with pytest.raises(ValueError):
            grid.times[0] = 5.0

    def test_from_dates(self):
        """Curve time is ACT/365 from the valuation date."""
        grid = DateGrid.from_dates(VALUATION, [VALUATION, date(2020, 11, 5)])
        np.testing.assert_allclose(grid.times, [0.0, 365 / 365])
        assert grid.valuation_date == VALUATION


class TestYearFraction:
    def test_act365(self):
        assert year_fraction(date(2019, 11, 6), date(2019, 11, 7)) == pytest.approx(1 / 365)

    def test_before_valuation(self):
        with pytest.raises(CurveError):
            year_fraction(date(2019, 11, 6), date(2019, 11, 5))


class TestPiecewiseCubic:
    def test_evaluation_and_derivatives(self):
        """A single cubic piece matches its polynomial and derivatives."""
        pp = PiecewiseCubic(np.array([1.0, 3.0]), np.array([[1.0, 2.0, 3.0, 4.0]]))
        x = 0.5
        assert pp(1.5) == pytest.approx(1 + 2 * x + 3 * x**2 + 4 * x**3)
        assert pp.derivative(1.5, 1) == pytest.approx(2 + 6 * x + 12 * x**2)
        assert pp.derivative(1.5, 2) == pytest.approx(6 + 24 * x)
        assert pp.derivative(1.5, 3) == pytest.approx(24.0)

    def test_linear_extension(self):
        """Outside the knots the function continues with the boundary slope."""
        pp = PiecewiseCubic(np.array([1.0, 2.0]), np.array([[0.0, 1.0, 1.0, 0.0]]))
        assert pp(0.5) == pytest.approx(-0.5)
        assert pp(3.0) == pytest.approx(pp.end_value + pp.end_slope)
        assert pp.derivative(3.0, 2) == 0.0
        assert pp.derivative(0.0, 1) == pytest.approx(1.0)

    def test_invalid_order(self):
        pp = PiecewiseCubic(np.array([0.0, 1.0]), np.zeros((1, 4)))
        with pytest.raises(CurveError):
            pp.derivative(0.5, 4)

    def test_coefficient_count_mismatch(self):
        with pytest.raises(CurveError):
            PiecewiseCubic(np.array([0.0, 1.0, 2.0]), np.zeros((1, 4)))

    def test_taylor_picks_requested_piece(self):
        """At a knot the piece can be chosen explicitly."""
        coeffs = np.array([[0.0, 1.0, 0.0, 0.0], [1.0, 1.0, 5.0, 0.0]])
        pp = PiecewiseCubic(np.array([0.0, 1.0, 2.0]), coeffs)
        left = pp.taylor(1.0, piece_at=0.5)
        right = pp.taylor(1.0, piece_at=1.5)
        np.testing.assert_allclose(left, [1.0, 1.0, 0.0, 0.0])
        np.testing.assert_allclose(right, [1.0, 1.0, 5.0, 0.0])

    def test_shift_polynomial(self):
        """Re-expansion preserves values."""
        c = np.array([0.3, -1.0, 2.0, 0.5])
        shifted = shift_polynomial(c, 0.7)
        x = 0.2
        original = c[0] + c[1] * (x + 0.7) + c[2] * (x + 0.7) ** 2 + c[3] * (x + 0.7) ** 3
        assert shifted[0] + shifted[1] * x + shifted[2] * x**2 + shifted[3] * x**3 == pytest.approx(original)


class TestAccessors:
    def test_flat_curve(self):
        """Flat curve: constant zero and forward rates, no curvature."""
        curve = flat_curve(0.03)
        t = np.array([0.0, 0.25, 1.0, 7.5, 40.0])
        np.testing.assert_allclose(discount(curve, t), np.exp(-0.03 * t), rtol=1e-13)
        np.testing.assert_allclose(zero_rate(curve, t), 0.03, rtol=1e-12)
        np.testing.assert_allclose(curve.instantaneous_forward(t), 0.03, rtol=1e-12)
        np.testing.assert_allclose(curve.forward_curvature(t), 0.0, atol=1e-12)

    def test_zero_rate_at_origin(self):
        """At t = 0 the zero rate is the right-limit forward."""
        curve = sloped_curve()
        assert zero_rate(curve, 0.0) == pytest.approx(float(curve.instantaneous_forward(0.0)))

    def test_scalar_in_scalar_out(self):
        curve = flat_curve(0.01)
        assert isinstance(discount(curve, 1.0), float)
        assert isinstance(zero_rate(curve, np.array([1.0])), np.ndarray)

    def test_negative_time_rejected(self):
        with pytest.raises(CurveError):
            discount(flat_curve(0.01), -1.0)

    def test_discrete_forwards(self):
        """Continuously and simply compounded forwards on a flat curve."""
        curve = flat_curve(0.02)
        assert discrete_forward_cc(curve, 1.0, 2.0) == pytest.approx(0.02)
        assert discrete_forward_simple(curve, 1.0, 1.5, 0.5) == pytest.approx(np.expm1(0.01) / 0.5)

    def test_discrete_forward_requires_order(self):
        with pytest.raises(CurveError):
            discrete_forward_cc(flat_curve(0.02), 2.0, 1.0)

    def test_zero_curve_origin_check(self):
        """A grid starting at 0 needs z(0) = 0."""
        grid = DateGrid(np.array([0.0, 1.0]))
        z = np.array([0.1, -0.02])
        with pytest.raises(CurveError):
            ZeroCurve(grid=grid, z=z, pp=hermite_coefficients(grid, z, np.zeros(2)), scheme="c2")

    def test_sample(self):
        curve = sloped_curve()
        s = sample(curve, 2.5)
        assert s.t == 2.5
        assert s.discount == pytest.approx(float(curve.discount(2.5)))
        assert s.zero == pytest.approx(-np.log(s.discount) / 2.5)
        assert s.inst_forward == pytest.approx(float(curve.instantaneous_forward(2.5)))


class TestCurveProtocol:
    def test_both_curve_kinds_satisfy_protocol(self):
        times = np.array([1.0, 2.0, 5.0])
        z = np.array([-0.01, -0.025, -0.08])
        assert isinstance(sloped_curve(), Curve)
        assert isinstance(forward_curve_from_zero_values(times, z, Scheme.SMART_QUADRATIC), Curve)
