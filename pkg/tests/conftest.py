"""Shared test fixtures."""

import tempfile
from pathlib import Path

import numpy as np
import pytest

from yieldspline.calibration import CalibrationProblem, calibrate
from yieldspline.marketdata import FEDFUND_20191106, load_market_data


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def rng():
    """Seeded random generator."""
    return np.random.default_rng(20191106)


@pytest.fixture
def fixture_path() -> Path:
    """The shipped 2019-11-06 Fed fund quote file."""
    return FEDFUND_20191106


@pytest.fixture
def market(fixture_path):
    return load_market_data(fixture_path)


@pytest.fixture(scope="session")
def fedfund_problem():
    market = load_market_data(FEDFUND_20191106)
    return CalibrationProblem(quotes=tuple(market.quotes), valuation_date=market.valuation)


@pytest.fixture(scope="session")
def fedfund_result(fedfund_problem):
    """The shipped quote file calibrated once with the natural C2 scheme."""
    return calibrate(fedfund_problem)
