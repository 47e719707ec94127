"""Tests for Levenberg-Marquardt calibration."""

from datetime import date

import numpy as np
import pytest

from tests.curves import VALUATION
from yieldspline.calibration import (
    CalibrationError,
    CalibrationProblem,
    LMOptions,
    build_curve,
    calibrate,
    initial_guess,
    levenberg_marquardt,
    residuals,
)
from yieldspline.config import CalibrationConfig
from yieldspline.curve import year_fraction
from yieldspline.forward import ForwardSplineCurve
from yieldspline.instruments import OisSwap, OvernightDeposit, Quote, accrual, model_rate
from yieldspline.interpolation import Scheme


def short_problem(market, scheme=Scheme.C2_NATURAL, n=6):
    return CalibrationProblem(quotes=tuple(market.quotes[:n]), valuation_date=market.valuation, scheme=scheme)


class TestLevenbergMarquardt:
    def test_linear(self):
        result = levenberg_marquardt(lambda x: x - 3.0, np.array([0.0]))
        assert result.converged
        assert result.x[0] == pytest.approx(3.0, abs=1e-11)
        assert result.message == "residuals below tolerance"

    def test_rosenbrock(self):
        """Classic curved valley as a least-squares problem."""
        def fn(x):
            return np.array([10.0 * (x[1] - x[0] ** 2), 1.0 - x[0]])

        result = levenberg_marquardt(fn, np.array([-1.2, 1.0]))
        assert result.converged
        np.testing.assert_allclose(result.x, [1.0, 1.0], atol=1e-8)

    def test_damping_moves(self):
        result = levenberg_marquardt(lambda x: x**2 - 2.0, np.array([1.0]))
        assert result.converged
        assert result.x[0] == pytest.approx(np.sqrt(2.0), abs=1e-10)
        assert result.damping_history[0] == LMOptions().initial_damping
        assert result.damping_history[-1] < result.damping_history[0]

    def test_failing_trial_is_a_rejected_step(self):
        """A trial point the residual function cannot evaluate raises the damping."""
        def fn(x):
            if x[0] > 5.0:
                raise CalibrationError(f"Knot value {x[0]} outside the curve domain")
            return x**2 - 4.0

        result = levenberg_marquardt(fn, np.array([0.1]))
        assert result.converged
        assert result.x[0] == pytest.approx(2.0, abs=1e-10)
        assert result.damping_history[1] == 2.0 * result.damping_history[0]

    def test_iteration_limit(self):
        """Non-convergence is reported, not raised."""
        result = levenberg_marquardt(lambda x: x**2 + 1.0, np.array([1.0]), LMOptions(max_iterations=5))
        assert not result.converged

    def test_rejects_non_finite_start(self):
        with pytest.raises(CalibrationError):
            levenberg_marquardt(lambda x: x, np.array([np.nan]))

    def test_threaded_jacobian_matches(self):
        def fn(x):
            return np.array([x[0] + x[1] ** 2 - 3.0, x[0] * x[1] - 1.0, x[2] - 0.5])

        serial = levenberg_marquardt(fn, np.array([1.0, 1.0, 0.0]))
        threaded = levenberg_marquardt(fn, np.array([1.0, 1.0, 0.0]), LMOptions(jacobian_workers=2))
        np.testing.assert_array_equal(serial.x, threaded.x)
        assert serial.iterations == threaded.iterations

    def test_options_from_config(self):
        opts = LMOptions.from_config(CalibrationConfig(max_iterations=7, jacobian_workers=3))
        assert opts.max_iterations == 7
        assert opts.jacobian_workers == 3
        assert opts.tolerance == 1e-11


class TestCalibrationProblem:
    def test_knots_at_instrument_ends(self, market):
        problem = short_problem(market)
        assert problem.knot_times[0] == pytest.approx(1 / 365)
        # Z19 future: knot at its end date
        assert problem.knot_times[2] == pytest.approx(year_fraction(VALUATION, date(2020, 1, 2)))

    def test_needs_quotes(self):
        with pytest.raises(CalibrationError):
            CalibrationProblem(quotes=(), valuation_date=VALUATION)

    def test_needs_increasing_ends(self):
        dep = Quote(OvernightDeposit(VALUATION, date(2019, 11, 7)), 0.0156)
        with pytest.raises(CalibrationError):
            CalibrationProblem(quotes=(dep, dep), valuation_date=VALUATION)

    def test_residual_shape(self, market):
        with pytest.raises(CalibrationError):
            residuals(np.zeros(3), short_problem(market))

    def test_initial_guess(self, market):
        problem = short_problem(market)
        np.testing.assert_allclose(initial_guess(problem), -0.0156 * problem.knot_times)
        np.testing.assert_allclose(initial_guess(problem, 0.0), 0.0)

    def test_build_curve_forward_space(self):
        curve = build_curve([1.0, 2.0], [-0.01, -0.03], Scheme.AREA_PRESERVING)
        assert isinstance(curve, ForwardSplineCurve)


class TestFedFundCurve:
    def test_reprices_every_quote(self, fedfund_problem, fedfund_result):
        """Full 2019-11-06 quote set reprices to better than 1e-9."""
        assert fedfund_result.converged
        assert fedfund_result.iterations <= 50
        assert fedfund_result.max_residual < 1e-9
        for q in fedfund_problem.quotes:
            assert model_rate(fedfund_result.curve, q.instrument) == pytest.approx(q.par_rate, abs=1e-9)

    def test_knot_bump_moves_one_year_swap(self, fedfund_problem, fedfund_result):
        """Bumping the 1Y knot changes the single-coupon 1Y swap in closed form."""
        z = np.array(fedfund_result.curve.z[1:])
        index = next(i for i, q in enumerate(fedfund_problem.quotes) if q.instrument.label == "1Y")
        swap = fedfund_problem.quotes[index].instrument
        assert isinstance(swap, OisSwap)

        base = residuals(z, fedfund_problem)
        eps = 1e-4
        bumped_z = z.copy()
        bumped_z[index] += eps
        bumped = residuals(bumped_z, fedfund_problem)

        curve = fedfund_result.curve
        p_start = float(curve.discount(year_fraction(VALUATION, swap.start)))
        p_end = float(curve.discount(year_fraction(VALUATION, swap.maturity)))
        expected = p_start / (accrual(swap.start, swap.maturity) * p_end) * (np.exp(-eps) - 1.0)
        assert bumped[index] - base[index] == pytest.approx(expected, rel=1e-9)
        # overnight deposits only see their own knots
        np.testing.assert_allclose(bumped[:2], base[:2], atol=1e-14)

    def test_initial_guess_does_not_matter(self, fedfund_problem, fedfund_result):
        from_zero = calibrate(fedfund_problem, initial_rate=0.0)
        assert from_zero.converged
        np.testing.assert_allclose(from_zero.curve.z, fedfund_result.curve.z, atol=1e-8)


class TestSchemes:
    def test_bessel_and_smart_quadratic_agree(self, market):
        """Equivalent schemes calibrate to the same knot values."""
        bessel = calibrate(short_problem(market, Scheme.BESSEL, n=12))
        smart = calibrate(short_problem(market, Scheme.SMART_QUADRATIC, n=12))
        assert bessel.converged and smart.converged
        np.testing.assert_allclose(bessel.curve.z, smart.curve.z, atol=1e-10)

    def test_lavery_needs_opt_in(self, market):
        problem = short_problem(market, Scheme.LAVERY, n=3)
        with pytest.raises(CalibrationError):
            calibrate(problem)

    def test_lavery_with_opt_in(self, market):
        problem = short_problem(market, Scheme.LAVERY, n=2)
        result = calibrate(problem, allow_lavery=True)
        assert result.converged
        assert result.curve.scheme == "lavery"

    def test_threaded_calibration(self, market):
        problem = short_problem(market)
        serial = calibrate(problem)
        threaded = calibrate(problem, LMOptions(jacobian_workers=2))
        np.testing.assert_array_equal(serial.curve.z, threaded.curve.z)
