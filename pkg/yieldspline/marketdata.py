"""CSV formats: market quotes, calibrated curves and sampled reports.

Quote files look like::

    # valuation=2019-11-06
    instrument_kind,maturity_date,par_rate,start_date,label
    ois_deposit,2019-11-07,0.01560,,1D
    ff_future,2020-01-02,0.01560,2019-12-02,Z19
    ois_swap,2029-11-08,0.01484,,10Y

``start_date`` and ``label`` may be left empty or omitted. A missing start
defaults to the valuation date for deposits, to the first business day of
the contract month for futures and to the spot date for swaps.

Curve files hold the knots of a calibrated curve (``date,t,z,discount``)
after a ``# valuation=...,scheme=...`` comment line.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

import numpy as np

from .calibration import build_curve
from .curve import Curve, FloatArray, year_fraction
from .instruments import (
    SPOT_LAG_DAYS,
    FedFundFuture,
    Instrument,
    InstrumentError,
    OisSwap,
    OvernightDeposit,
    Quote,
    contract_month_start,
    spot_date,
)
from .interpolation import Scheme
from .lavery import LaverySpec

logger = logging.getLogger(__name__)

QUOTE_HEADER = ["instrument_kind", "maturity_date", "par_rate", "start_date", "label"]
CURVE_HEADER = ["date", "t", "z", "discount"]
REPORT_HEADER = ["t", "discount", "zero", "inst_forward", "one_day_forward", "second_deriv"]
KINDS = ("ois_deposit", "ff_future", "ois_swap")
DEFAULT_DIGITS = 12

FEDFUND_20191106 = Path(__file__).parent / "data" / "fedfund_20191106.csv"


class QuoteFileError(ValueError):
    """Malformed market-data or curve file."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


@dataclass(frozen=True)
class QuoteFileRow:
    instrument_kind: str
    maturity_date: date
    par_rate: float
    start_date: date | None = None
    label: str = ""
    line: int = 0


@dataclass
class MarketData:
    valuation: date
    quotes: list[Quote] = field(default_factory=list)


@dataclass(frozen=True)
class ReportRow:
    t: float
    discount: float
    zero: float
    inst_forward: float
    one_day_forward: float
    second_deriv: float


def _fmt(x: float, digits: int = DEFAULT_DIGITS) -> str:
    return f"{x:.{digits}g}"


def _parse_date(text: str, line: int, column: str) -> date:
    try:
        return date.fromisoformat(text.strip())
    except ValueError as e:
        raise QuoteFileError(f"invalid {column} '{text}'", line) from e


def _parse_comment(text: str) -> dict[str, str]:
    """``# key=value,key=value`` into a dict."""
    items = {}
    for part in text.lstrip("#").split(","):
        if "=" in part:
            key, value = part.split("=", 1)
            items[key.strip()] = value.strip()
    return items


def _read_lines(path: Path) -> tuple[dict[str, str], list[tuple[int, list[str]]]]:
    """Comment metadata and the numbered data rows, header included."""
    meta: dict[str, str] = {}
    rows: list[tuple[int, list[str]]] = []
    with path.open("r", encoding="utf-8", newline="") as f:
        for number, line in enumerate(f, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                meta.update(_parse_comment(stripped))
                continue
            rows.append((number, next(csv.reader([stripped]))))
    return meta, rows


def parse_row(fields: list[str], line: int) -> QuoteFileRow:
    if len(fields) < 3:
        raise QuoteFileError(f"expected at least 3 fields, got {len(fields)}", line)
    kind = fields[0].strip()
    if kind not in KINDS:
        raise QuoteFileError(f"unknown instrument kind '{kind}'", line)
    maturity = _parse_date(fields[1], line, "maturity_date")
    try:
        rate = float(fields[2])
    except ValueError as e:
        raise QuoteFileError(f"invalid par rate '{fields[2]}'", line) from e
    if not math.isfinite(rate):
        raise QuoteFileError(f"par rate must be finite, got '{fields[2]}'", line)
    start = None
    if len(fields) > 3 and fields[3].strip():
        start = _parse_date(fields[3], line, "start_date")
    label = fields[4].strip() if len(fields) > 4 else ""
    return QuoteFileRow(kind, maturity, rate, start, label, line)


def to_quote(row: QuoteFileRow, valuation: date, spot_lag: int = SPOT_LAG_DAYS) -> Quote:
    """Instrument for a file row, filling in default start dates."""
    instrument: Instrument
    try:
        if row.instrument_kind == "ois_deposit":
            instrument = OvernightDeposit(row.start_date or valuation, row.maturity_date, row.label)
        elif row.instrument_kind == "ff_future":
            start = row.start_date or contract_month_start(row.maturity_date)
            instrument = FedFundFuture(start, row.maturity_date, row.label)
        else:
            instrument = OisSwap(row.start_date or spot_date(valuation, spot_lag), row.maturity_date, row.label)
        return Quote(instrument, row.par_rate)
    except InstrumentError as e:
        raise QuoteFileError(str(e), row.line) from e


def load_market_data(path: str | Path, valuation: date | None = None, spot_lag: int = SPOT_LAG_DAYS) -> MarketData:
    """Read a quote file.

    Raises:
        FileNotFoundError: If the file does not exist
        QuoteFileError: On a malformed header or row, or when there are no quotes
    """
    path = Path(path)
    meta, rows = _read_lines(path)
    if valuation is None:
        if "valuation" not in meta:
            raise QuoteFileError(f"{path}: missing '# valuation=YYYY-MM-DD' line")
        valuation = _parse_date(meta["valuation"], 1, "valuation date")

    if not rows:
        raise QuoteFileError(f"{path}: missing header")
    header_line, header = rows[0]
    if [h.strip() for h in header[:3]] != QUOTE_HEADER[:3]:
        raise QuoteFileError(f"expected header starting with {','.join(QUOTE_HEADER[:3])}", header_line)
    if len(rows) == 1:
        raise QuoteFileError(f"{path}: no quotes")

    quotes = [to_quote(parse_row(fields, line), valuation, spot_lag) for line, fields in rows[1:]]
    logger.debug(f"Loaded {len(quotes)} quotes from {path} (valuation {valuation})")
    return MarketData(valuation=valuation, quotes=quotes)


def parse_quotes(path: str | Path, valuation: date | None = None) -> list[Quote]:
    """Quotes of a file in file order."""
    return load_market_data(path, valuation).quotes


def _kind(instrument: Instrument) -> tuple[str, date, date]:
    match instrument:
        case OvernightDeposit(start=start, maturity=end):
            return "ois_deposit", end, start
        case FedFundFuture(start=start, end=end):
            return "ff_future", end, start
        case OisSwap(start=start, maturity=end):
            return "ois_swap", end, start
    raise InstrumentError(f"Unknown instrument {instrument!r}")


def write_quotes(path: str | Path, quotes: list[Quote], valuation: date) -> None:
    """Write quotes with explicit start dates, so that reading them back is exact."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as f:
        f.write(f"# valuation={valuation.isoformat()}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(QUOTE_HEADER)
        for q in quotes:
            kind, end, start = _kind(q.instrument)
            writer.writerow([kind, end.isoformat(), repr(q.par_rate), start.isoformat(), q.instrument.label])


def write_curve(path: str | Path, curve: Curve, digits: int = DEFAULT_DIGITS) -> None:
    """Knot table of a calibrated curve; needs a valuation date."""
    valuation = curve.valuation_date
    if valuation is None:
        raise QuoteFileError("Cannot write a curve without a valuation date")
    times = np.asarray(curve.grid.times)  # type: ignore[attr-defined]
    z = np.asarray(curve.z)  # type: ignore[attr-defined]
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as f:
        f.write(f"# valuation={valuation.isoformat()},scheme={curve.scheme}\n")  # type: ignore[attr-defined]
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CURVE_HEADER)
        for t, zi in zip(times, z, strict=True):
            d = date.fromordinal(valuation.toordinal() + round(t * 365))
            writer.writerow([d.isoformat(), _fmt(t, digits), _fmt(zi, digits), _fmt(math.exp(zi), digits)])


def read_curve_file(path: str | Path, lavery_spec: LaverySpec | None = None) -> Curve:
    """Rebuild a curve written by ``write_curve`` with its interpolation scheme."""
    path = Path(path)
    meta, rows = _read_lines(path)
    try:
        valuation = date.fromisoformat(meta["valuation"])
        scheme = Scheme(meta.get("scheme", Scheme.C2_NATURAL.value))
    except (KeyError, ValueError) as e:
        raise QuoteFileError(f"{path}: missing or invalid '# valuation=...,scheme=...' line") from e
    if not rows or [h.strip() for h in rows[0][1]] != CURVE_HEADER:
        raise QuoteFileError(f"{path}: expected header {','.join(CURVE_HEADER)}")

    times: list[float] = []
    zs: list[float] = []
    for line, fields in rows[1:]:
        if len(fields) < 3:
            raise QuoteFileError(f"expected {len(CURVE_HEADER)} fields, got {len(fields)}", line)
        times.append(year_fraction(valuation, _parse_date(fields[0], line, "date")))
        try:
            zs.append(float(fields[2]))
        except ValueError as e:
            raise QuoteFileError(f"invalid z '{fields[2]}'", line) from e
    if len(times) < 2:
        raise QuoteFileError(f"{path}: a curve needs at least two knots")
    return build_curve(np.array(times), np.array(zs), scheme, valuation, lavery_spec)


def write_report(path: str | Path, rows: list[ReportRow], digits: int = DEFAULT_DIGITS) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(REPORT_HEADER)
        for r in rows:
            writer.writerow([_fmt(v, digits) for v in (
                r.t, r.discount, r.zero, r.inst_forward, r.one_day_forward, r.second_deriv
            )])


def knot_values(curve: Curve) -> tuple[FloatArray, FloatArray]:
    """Knot times and log-discounts of a zero or forward-space curve."""
    return np.asarray(curve.grid.times), np.asarray(curve.z)  # type: ignore[attr-defined]
