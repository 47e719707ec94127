"""Tests for forward-space interpolation."""

import numpy as np
import pytest
from scipy.integrate import quad

from tests.curves import sloped_knots
from yieldspline.curve import CurveError, DateGrid
from yieldspline.forward import (
    ForwardSplineCurve,
    area_preserving_eval,
    area_preserving_node_forwards,
    as_zero_curve,
    forward_curve_from_discrete,
    forward_curve_from_zero_values,
    hagan_node_forwards,
    histopolant,
    smart_quadratic_eval,
)
from yieldspline.interpolation import InterpolationError, Scheme, build_zero_curve

PAIRS = [
    (Scheme.SMART_QUADRATIC, Scheme.BESSEL),
    (Scheme.AREA_PRESERVING, Scheme.C2_NATURAL),
]


@pytest.fixture
def knots():
    return sloped_knots()


class TestEquivalence:
    @pytest.mark.parametrize("forward_kind,zero_scheme", PAIRS)
    def test_forward_is_minus_zero_slope(self, knots, forward_kind, zero_scheme):
        """Each forward scheme equals minus the derivative of its z-space partner."""
        times, z = knots
        fwd = forward_curve_from_zero_values(times, z, forward_kind)
        zero = build_zero_curve(times, z, zero_scheme)
        t = np.linspace(0.0, 65.0, 2001)
        np.testing.assert_allclose(fwd.instantaneous_forward(t), zero.instantaneous_forward(t), atol=1e-13)
        np.testing.assert_allclose(fwd.log_discount(t), zero.log_discount(t), atol=1e-12)

    def test_node_forwards_match_slopes(self, knots):
        times, z = knots
        c2 = build_zero_curve(times, z, Scheme.C2_NATURAL)
        fwd = forward_curve_from_zero_values(times, z, Scheme.AREA_PRESERVING)
        np.testing.assert_allclose(fwd.f, -c2.pp.derivative(c2.grid.times, 1), atol=1e-13)

    @pytest.mark.parametrize("forward_kind,zero_scheme", PAIRS)
    def test_as_zero_curve(self, knots, forward_kind, zero_scheme):
        times, z = knots
        fwd = forward_curve_from_zero_values(times, z, forward_kind)
        converted = as_zero_curve(fwd)
        assert converted.scheme == zero_scheme.value
        np.testing.assert_allclose(converted.z, fwd.z, atol=1e-15)
        t = np.linspace(0.0, 60.0, 301)
        np.testing.assert_allclose(converted.instantaneous_forward(t), fwd.instantaneous_forward(t), atol=1e-13)

    def test_curvature_matches_c2_third_derivative(self, knots):
        times, z = knots
        fwd = forward_curve_from_zero_values(times, z, Scheme.AREA_PRESERVING)
        zero = build_zero_curve(times, z, Scheme.C2_NATURAL)
        mids = 0.5 * (fwd.grid.times[1:] + fwd.grid.times[:-1])
        np.testing.assert_allclose(fwd.forward_curvature(mids), zero.forward_curvature(mids), atol=1e-10)


class TestForwardSpline:
    @pytest.mark.parametrize("kind", [Scheme.SMART_QUADRATIC, Scheme.AREA_PRESERVING])
    def test_interval_means(self, knots, kind):
        """The forward integrates to the discrete forward on every interval."""
        times, z = knots
        fwd = forward_curve_from_zero_values(times, z, kind)
        t = fwd.grid.times
        for i in range(fwd.grid.n_intervals):
            area, _ = quad(lambda u: float(fwd.instantaneous_forward(u)), t[i], t[i + 1])
            assert area / (t[i + 1] - t[i]) == pytest.approx(fwd.fd[i], abs=1e-12)

    @pytest.mark.parametrize("kind", [Scheme.SMART_QUADRATIC, Scheme.AREA_PRESERVING])
    def test_knot_values(self, knots, kind):
        times, z = knots
        fwd = forward_curve_from_zero_values(times, z, kind)
        np.testing.assert_allclose(fwd.log_discount(times), z, atol=1e-14)
        assert fwd.log_discount(0.0) == 0.0

    @pytest.mark.parametrize("kind", [Scheme.SMART_QUADRATIC, Scheme.AREA_PRESERVING])
    def test_continuous_at_knots(self, knots, kind):
        times, z = knots
        fwd = forward_curve_from_zero_values(times, z, kind)
        inner = fwd.grid.times[1:-1]
        left = fwd.instantaneous_forward(inner - 1e-10)
        right = fwd.instantaneous_forward(inner)
        np.testing.assert_allclose(left, right, atol=1e-9)

    def test_flat_input(self):
        grid = DateGrid(np.array([0.0, 0.5, 2.0, 7.0]))
        for kind in (Scheme.SMART_QUADRATIC, Scheme.AREA_PRESERVING):
            fwd = forward_curve_from_discrete(grid, [0.02, 0.02, 0.02], kind)
            np.testing.assert_allclose(fwd.instantaneous_forward([0.0, 0.3, 1.0, 6.9, 9.0]), 0.02, rtol=1e-13)
            np.testing.assert_allclose(fwd.forward_curvature([0.3, 6.9]), 0.0, atol=1e-13)

    def test_flat_beyond_grid(self, knots):
        """Forward is flat and z linear outside the knots."""
        times, z = knots
        fwd = forward_curve_from_zero_values(times, z, Scheme.AREA_PRESERVING)
        assert fwd.instantaneous_forward(70.0) == pytest.approx(fwd.f[-1])
        assert fwd.log_discount(70.0) == pytest.approx(fwd.z[-1] - 10.0 * fwd.f[-1])
        assert fwd.forward_curvature(70.0) == 0.0

    def test_single_interval(self):
        fwd = forward_curve_from_discrete([0.0, 1.0], [0.015], Scheme.SMART_QUADRATIC)
        np.testing.assert_allclose(fwd.f, [0.015, 0.015])

    def test_area_preserving_c1(self, knots):
        """Quadratic forward slopes agree on both sides of interior knots."""
        times, z = knots
        fwd = forward_curve_from_zero_values(times, z, Scheme.AREA_PRESERVING)
        t, h = fwd.grid.times, fwd.grid.spacing
        a, b, c = fwd._quadratic(np.arange(fwd.grid.n_intervals))
        right_end_slope = (b + 2.0 * c) / h
        left_start_slope = b / h
        np.testing.assert_allclose(right_end_slope[:-1], left_start_slope[1:], atol=1e-12)
        assert len(t) == len(fwd.f)


class TestNodeForwards:
    def test_hagan_interior(self):
        grid = DateGrid(np.array([0.0, 1.0, 3.0]))
        f = hagan_node_forwards(grid, [0.01, 0.04])
        assert f[1] == pytest.approx((1.0 * 0.04 + 2.0 * 0.01) / 3.0)
        assert f[0] == pytest.approx(0.01 - 0.5 * (f[1] - 0.01))

    def test_area_preserving_zero_end_slope(self):
        """The end node conditions give zero forward slope at both ends."""
        grid = DateGrid(np.array([0.0, 1.0, 2.5, 3.0]))
        fd = np.array([0.01, 0.03, 0.02])
        curve = forward_curve_from_discrete(grid, fd, Scheme.AREA_PRESERVING)
        np.testing.assert_allclose(curve.f, area_preserving_node_forwards(grid, fd))
        a, b, c = curve._quadratic(np.array([0, 2]))
        assert b[0] == pytest.approx(0.0, abs=1e-14)
        assert b[1] + 2.0 * c[1] == pytest.approx(0.0, abs=1e-14)


class TestErrors:
    def test_zero_space_scheme_rejected(self):
        with pytest.raises(InterpolationError):
            forward_curve_from_discrete([0.0, 1.0], [0.01], Scheme.BESSEL)

    def test_direct_construction_checks_kind(self):
        with pytest.raises(CurveError):
            ForwardSplineCurve(DateGrid(np.array([0.0, 1.0])), [0.01], [0.01, 0.01], Scheme.C2_NATURAL)

    def test_wrong_length(self):
        with pytest.raises(InterpolationError):
            forward_curve_from_discrete([0.0, 1.0, 2.0], [0.01], Scheme.AREA_PRESERVING)

    def test_eval_kind_mismatch(self):
        curve = forward_curve_from_discrete([0.0, 1.0], [0.01], Scheme.AREA_PRESERVING)
        with pytest.raises(CurveError):
            smart_quadratic_eval(curve, 0.5)
        assert area_preserving_eval(curve, 0.5) == pytest.approx(0.01)


class TestHistopolant:
    def test_reproduces_interval_means(self):
        knots = np.array([0.0, 0.7, 1.0, 2.2, 4.0])
        heights = np.array([3.0, -1.0, 0.5, 2.0])
        hist = histopolant(knots, heights)
        for i in range(len(heights)):
            area, _ = quad(lambda u: float(hist(u)), knots[i], knots[i + 1])
            assert area / (knots[i + 1] - knots[i]) == pytest.approx(heights[i], abs=1e-12)

    def test_equals_area_preserving_forward(self, knots):
        """The histopolant of the discrete forwards is the area-preserving forward."""
        times, z = knots
        fwd = forward_curve_from_zero_values(times, z, Scheme.AREA_PRESERVING)
        hist = histopolant(fwd.grid.times, fwd.fd)
        t = np.linspace(0.0, 60.0, 500)
        np.testing.assert_allclose(hist(t), fwd.instantaneous_forward(t), atol=1e-13)
