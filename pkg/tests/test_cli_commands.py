"""Tests for the command-line interface and its commands."""

import csv

import pytest

from yieldspline.cli import EXIT_INPUT, EXIT_NUMERIC, EXIT_OK, build_parser, main
from yieldspline.commands import sample_rows
from yieldspline.marketdata import REPORT_HEADER

SMALL_REPORT = """
[report]
curves = 2
points = 200

[lavery]
samples_per_interval = 4
"""


@pytest.fixture(autouse=True)
def no_default_config(temp_dir, monkeypatch):
    """Run every command where no config.toml exists."""
    monkeypatch.chdir(temp_dir)
    monkeypatch.delenv("YIELDSPLINE_SEED", raising=False)


def run(argv):
    with pytest.raises(SystemExit) as exc_info:
        main(argv)
    return exc_info.value.code


@pytest.fixture
def curve_file(temp_dir, fixture_path):
    out = temp_dir / "curve.csv"
    assert run(["calibrate", "--quotes", str(fixture_path), "--out", str(out)]) == EXIT_OK
    return out


class TestParser:
    def test_defaults(self):
        args = build_parser().parse_args(["sample", "--curve", "c.csv", "--to", "2", "--out", "r.csv"])
        assert args.start == 0.0
        assert args.step == pytest.approx(1 / 365)
        assert args.tenor == pytest.approx(1 / 365)

    def test_common_options_either_side(self):
        before = build_parser().parse_args(["-v", "-c", "a.toml", "equivalence-report"])
        after = build_parser().parse_args(["equivalence-report", "-v", "-c", "a.toml"])
        for args in (before, after):
            assert args.verbose
            assert str(args.config) == "a.toml"
        assert build_parser().parse_args(["equivalence-report"]).config is None

    def test_unknown_scheme(self):
        assert run(["calibrate", "--quotes", "q.csv", "--scheme", "linear", "--out", "c.csv"]) == 2

    def test_no_command_prints_help(self, capsys):
        assert run([]) == EXIT_OK
        assert "calibrate" in capsys.readouterr().out


class TestCalibrate:
    def test_writes_curve(self, capsys, curve_file):
        out = capsys.readouterr().out
        assert "Max residual" in out
        assert "10Y" in out
        with curve_file.open() as f:
            lines = f.read().splitlines()
        assert lines[0] == "# valuation=2019-11-06,scheme=c2"
        assert lines[1] == "date,t,z,discount"
        # origin plus one knot per quote
        assert len(lines) == 2 + 30

    def test_forward_space_scheme(self, temp_dir, fixture_path):
        out = temp_dir / "curve.csv"
        code = run(["calibrate", "--quotes", str(fixture_path), "--scheme", "smart-quad", "--out", str(out)])
        assert code == EXIT_OK
        assert "scheme=smart-quad" in out.read_text()

    def test_missing_quotes(self, temp_dir):
        assert run(["calibrate", "--quotes", str(temp_dir / "none.csv"), "--out", "c.csv"]) == EXIT_INPUT

    def test_malformed_quotes(self, temp_dir):
        path = temp_dir / "bad.csv"
        path.write_text("# valuation=2019-11-06\ninstrument_kind,maturity_date,par_rate\nois_swap,2029-11-08,x\n")
        assert run(["calibrate", "--quotes", str(path), "--out", "c.csv"]) == EXIT_INPUT

    def test_lavery_needs_opt_in(self, temp_dir, fixture_path):
        out = temp_dir / "curve.csv"
        code = run(["calibrate", "--quotes", str(fixture_path), "--scheme", "lavery", "--out", str(out)])
        assert code == EXIT_NUMERIC
        assert not out.exists()

    def test_missing_config(self, temp_dir, fixture_path):
        code = run(["calibrate", "-c", str(temp_dir / "none.toml"), "--quotes", str(fixture_path), "--out", "c.csv"])
        assert code == EXIT_INPUT

    def test_invalid_config(self, temp_dir, fixture_path):
        config = temp_dir / "config.toml"
        config.write_text("[calibration]\nmax_iterations = 0\n")
        code = run(["calibrate", "-c", str(config), "--quotes", str(fixture_path), "--out", "c.csv"])
        assert code == EXIT_INPUT

    def test_iteration_limit(self, temp_dir, fixture_path):
        config = temp_dir / "config.toml"
        config.write_text("[calibration]\nmax_iterations = 1\n")
        out = temp_dir / "curve.csv"
        code = run(["calibrate", "-c", str(config), "--quotes", str(fixture_path), "--out", str(out)])
        assert code == EXIT_NUMERIC
        assert not out.exists()


class TestSample:
    def test_report(self, temp_dir, curve_file):
        out = temp_dir / "report.csv"
        code = run(["sample", "--curve", str(curve_file), "--to", "1", "--step", "0.25", "--out", str(out)])
        assert code == EXIT_OK
        with out.open() as f:
            rows = list(csv.reader(f))
        assert rows[0] == REPORT_HEADER
        assert len(rows) == 1 + 5
        assert float(rows[1][1]) == 1.0
        for row in rows[1:]:
            assert 0.0 < float(row[4]) < 0.03

    def test_bad_range(self, temp_dir, curve_file):
        code = run(["sample", "--curve", str(curve_file), "--from", "2", "--to", "1", "--out", str(temp_dir / "r.csv")])
        assert code == EXIT_INPUT

    def test_missing_curve(self, temp_dir):
        code = run(["sample", "--curve", str(temp_dir / "none.csv"), "--to", "1", "--out", str(temp_dir / "r.csv")])
        assert code == EXIT_INPUT

    def test_sample_rows(self, fedfund_result):
        rows = sample_rows(fedfund_result.curve, 0.0, 2.0, 0.5)
        assert [r.t for r in rows] == pytest.approx([0.0, 0.5, 1.0, 1.5, 2.0])
        assert rows[0].discount == pytest.approx(1.0)
        for r in rows:
            assert r.one_day_forward == pytest.approx(r.inst_forward, abs=1e-3)

    def test_sample_rows_rejects_step(self, fedfund_result):
        with pytest.raises(ValueError):
            sample_rows(fedfund_result.curve, 0.0, 1.0, 0.0)


class TestEquivalenceReport:
    def test_small_run(self, temp_dir, capsys):
        config = temp_dir / "config.toml"
        config.write_text(SMALL_REPORT)
        assert run(["equivalence-report", "-c", str(config), "--seed", "7"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "smart-quad~bessel" in out
        assert "FAIL" not in out
        assert "Seed 7, 2 curves, 200 points per curve" in out

    def test_points_option(self, temp_dir, capsys):
        config = temp_dir / "config.toml"
        config.write_text(SMALL_REPORT)
        assert run(["equivalence-report", "-c", str(config), "--points", "50"]) == EXIT_OK
        assert "50 points per curve" in capsys.readouterr().out

    def test_seed_from_environment(self, temp_dir, monkeypatch, capsys):
        config = temp_dir / "config.toml"
        config.write_text(SMALL_REPORT)
        monkeypatch.setenv("YIELDSPLINE_SEED", "11")
        assert run(["equivalence-report", "-c", str(config)]) == EXIT_OK
        assert "Seed 11" in capsys.readouterr().out

    def test_default_config_file(self, temp_dir, capsys):
        """config.toml in the working directory is picked up without -c."""
        (temp_dir / "config.toml").write_text(SMALL_REPORT)
        assert run(["equivalence-report"]) == EXIT_OK
        assert "2 curves" in capsys.readouterr().out
