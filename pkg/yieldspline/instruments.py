"""Calibration instruments of an overnight (Fed fund) curve.

Conventions:
- curve time is ACT/365-fixed from the curve's valuation date;
- accruals are ACT/360;
- the calendar knows weekends only, no holidays;
- generated coupon dates landing on a weekend roll modified-following;
- payment lags are neglected, futures carry no convexity adjustment.

Compounding a daily rate ``r_j`` over ``[t_j, t_{j+1})`` gives the factor
``1 + r_j delta_j = P(t_j) / P(t_{j+1})``, so an OIS coupon and a futures
average are both functions of discount factors on the business-day grid.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import date, timedelta
from functools import lru_cache

import numpy as np

from .curve import Curve, CurveError, FloatArray, discrete_forward_cc, year_fraction

logger = logging.getLogger(__name__)

ACCRUAL_DAYS = 360
SPOT_LAG_DAYS = 2
COMPOUNDING_CHECK_TOLERANCE = 1e-13


class InstrumentError(ValueError):
    """Invalid instrument dates or schedule."""
    pass


# Calendar

def is_business_day(d: date) -> bool:
    return d.weekday() < 5


def add_business_days(d: date, n: int) -> date:
    """Move ``n`` business days forward (negative ``n`` moves back)."""
    step = timedelta(days=1 if n >= 0 else -1)
    remaining = abs(n)
    while remaining:
        d += step
        if is_business_day(d):
            remaining -= 1
    return d


def adjust_modified_following(d: date) -> date:
    """Next business day, unless that leaves the month; then the previous one."""
    rolled = d
    while not is_business_day(rolled):
        rolled += timedelta(days=1)
    if rolled.month == d.month:
        return rolled
    rolled = d
    while not is_business_day(rolled):
        rolled -= timedelta(days=1)
    return rolled


def add_years(d: date, n: int) -> date:
    """Same calendar day ``n`` years away; 29 February falls back to the 28th."""
    try:
        return d.replace(year=d.year + n)
    except ValueError:
        return d.replace(year=d.year + n, day=28)


def spot_date(valuation: date, lag: int = SPOT_LAG_DAYS) -> date:
    return add_business_days(valuation, lag)


def contract_month_start(end: date) -> date:
    """First business day of the month before ``end``'s month (futures period start)."""
    first = end.replace(day=1) - timedelta(days=1)
    return adjust_modified_following(first.replace(day=1))


def accrual(start: date, end: date) -> float:
    return (end - start).days / ACCRUAL_DAYS


# Instruments

@dataclass(frozen=True)
class OvernightDeposit:
    """Single-period OIS from ``start`` to ``maturity`` (1D and 2D rows)."""
    start: date
    maturity: date
    label: str = ""

    def __post_init__(self):
        if not self.start < self.maturity:
            raise InstrumentError(f"Deposit maturity {self.maturity} must be after start {self.start}")


@dataclass(frozen=True)
class FedFundFuture:
    """Monthly future settling on the arithmetic average overnight rate over ``[start, end)``."""
    start: date
    end: date
    label: str = ""

    def __post_init__(self):
        if not self.start < self.end:
            raise InstrumentError(f"Future end {self.end} must be after start {self.start}")


@dataclass(frozen=True)
class OisSwap:
    """Annual-coupon OIS swap; coupons are rolled back from maturity."""
    start: date
    maturity: date
    label: str = ""

    def __post_init__(self):
        if not self.start < self.maturity:
            raise InstrumentError(f"Swap maturity {self.maturity} must be after start {self.start}")


Instrument = OvernightDeposit | FedFundFuture | OisSwap


@dataclass(frozen=True)
class Quote:
    instrument: Instrument
    par_rate: float

    def __post_init__(self):
        if not np.isfinite(self.par_rate):
            raise InstrumentError(f"Par rate must be finite, got {self.par_rate!r}")


def instrument_end(instrument: Instrument) -> date:
    """Date whose curve time becomes the instrument's calibration knot."""
    match instrument:
        case FedFundFuture(end=end):
            return end
        case OvernightDeposit(maturity=maturity) | OisSwap(maturity=maturity):
            return maturity
    raise InstrumentError(f"Unknown instrument {instrument!r}")


# Schedules

@dataclass(frozen=True)
class AccrualSchedule:
    """Business days ``dates`` in ``[start, end)`` with their ACT/360 accruals."""
    dates: tuple[date, ...]
    end: date
    accruals: tuple[float, ...]

    @property
    def boundaries(self) -> tuple[date, ...]:
        """Fixing dates followed by the period end."""
        return self.dates + (self.end,)

    @property
    def total_accrual(self) -> float:
        return float(sum(self.accruals))


@lru_cache(maxsize=1024)
def business_day_schedule(start: date, end: date) -> AccrualSchedule:
    """Weekday fixings in ``[start, end)``, each accruing to the next fixing or ``end``.

    Raises:
        InstrumentError: If ``start >= end`` or the period holds no business day
    """
    if not start < end:
        raise InstrumentError(f"Schedule start {start} must be before end {end}")
    days = [start + timedelta(days=k) for k in range((end - start).days)]
    dates = tuple(d for d in days if is_business_day(d))
    if not dates:
        raise InstrumentError(f"No business day between {start} and {end}")
    nexts = dates[1:] + (end,)
    accruals = tuple(accrual(d, n) for d, n in zip(dates, nexts, strict=True))
    return AccrualSchedule(dates=dates, end=end, accruals=accruals)


def swap_schedule(swap: OisSwap) -> list[tuple[date, date]]:
    """Coupon periods: one for a year or less, else annual dates rolled back from maturity."""
    n = round((swap.maturity - swap.start).days / 365.25)
    if n <= 1:
        return [(swap.start, swap.maturity)]
    ends = [adjust_modified_following(add_years(swap.maturity, -k)) for k in range(n - 1, 0, -1)]
    ends.append(swap.maturity)
    starts = [swap.start] + ends[:-1]
    return list(zip(starts, ends, strict=True))


# Pricing

def _valuation(curve: Curve) -> date:
    valuation = curve.valuation_date
    if valuation is None:
        raise InstrumentError("Pricing needs a curve with a valuation date")
    return valuation


def _discounts(curve: Curve, dates: tuple[date, ...] | list[date]) -> FloatArray:
    valuation = _valuation(curve)
    try:
        times = np.array([year_fraction(valuation, d) for d in dates])
    except CurveError as e:
        raise InstrumentError(str(e)) from e
    return np.exp(np.asarray(curve.log_discount(times), dtype=float))


def ois_compounded_coupon_rate(curve: Curve, sched: AccrualSchedule, verify: bool = False) -> float:
    """Compounded factor ``prod (1 + r_j delta_j)`` over the schedule.

    The product telescopes to ``P(t_1) / P(t_end)``; with ``verify`` the
    daily product is computed as well and a disagreement is logged.
    """
    p = _discounts(curve, sched.boundaries)
    factor = float(p[0] / p[-1])
    if verify:
        product = float(np.prod(p[:-1] / p[1:]))
        if abs(product - factor) > COMPOUNDING_CHECK_TOLERANCE * abs(factor):
            logger.warning(f"Compounded factor mismatch: telescoped {factor!r}, product {product!r}")
        else:
            logger.debug(f"Compounded factor {factor!r} verified over {len(sched.dates)} fixings")
    return factor


def ois_swap_annuity(curve: Curve, swap: OisSwap) -> float:
    periods = swap_schedule(swap)
    p_end = _discounts(curve, [e for _, e in periods])
    deltas = np.array([accrual(s, e) for s, e in periods])
    return float(deltas @ p_end)


def price_ois_swap(curve: Curve, swap: OisSwap, par_rate: float) -> float:
    """Receiver-float PV per unit notional: floating coupons minus fixed coupons."""
    periods = swap_schedule(swap)
    p_start = _discounts(curve, [s for s, _ in periods])
    p_end = _discounts(curve, [e for _, e in periods])
    deltas = np.array([accrual(s, e) for s, e in periods])
    return float(np.sum(p_start - p_end) - par_rate * (deltas @ p_end))


def ois_swap_par_rate(curve: Curve, swap: OisSwap) -> float:
    p_start, p_end = _discounts(curve, [swap.start, swap.maturity])
    return float((p_start - p_end) / ois_swap_annuity(curve, swap))


def fed_fund_future_rate(curve: Curve, fut: FedFundFuture) -> float:
    """Arithmetic average of the daily rates implied over the contract period."""
    sched = business_day_schedule(fut.start, fut.end)
    p = _discounts(curve, sched.boundaries)
    return float(np.sum(p[:-1] / p[1:] - 1.0) / sched.total_accrual)


def fed_fund_future_price(rate: float) -> float:
    return 100.0 * (1.0 - rate)


def price_overnight_deposit(curve: Curve, dep: OvernightDeposit, par_rate: float) -> float:
    p_start, p_end = _discounts(curve, [dep.start, dep.maturity])
    return float(p_start / p_end - 1.0 - par_rate * accrual(dep.start, dep.maturity))


def deposit_par_rate(curve: Curve, dep: OvernightDeposit) -> float:
    p_start, p_end = _discounts(curve, [dep.start, dep.maturity])
    return float((p_start / p_end - 1.0) / accrual(dep.start, dep.maturity))


def model_rate(curve: Curve, instrument: Instrument) -> float:
    """Curve-implied quote of an instrument in rate units."""
    match instrument:
        case OvernightDeposit():
            return deposit_par_rate(curve, instrument)
        case FedFundFuture():
            return fed_fund_future_rate(curve, instrument)
        case OisSwap():
            return ois_swap_par_rate(curve, instrument)
    raise InstrumentError(f"Unknown instrument {instrument!r}")


def overnight_forward(curve: Curve, d: date) -> float:
    """Continuously compounded forward from ``d`` to the next business day, in curve time."""
    valuation = _valuation(curve)
    following = add_business_days(d, 1)
    try:
        u, v = year_fraction(valuation, d), year_fraction(valuation, following)
    except CurveError as e:
        raise InstrumentError(str(e)) from e
    return discrete_forward_cc(curve, u, v)
