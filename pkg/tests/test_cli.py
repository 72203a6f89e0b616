import csv
import io
import json
import subprocess
import sys

import pytest

from mmblockage.analysis import SweepRecord
from mmblockage.cli import (
    CSV_FIELDS,
    OUTAGE_FIELDS,
    emit_results,
    format_json,
    main,
    parse_args,
    record_row,
)

FIG2_ARGV = (
    "sweep --rho-min 0.01 --rho-max 0.5 --rho-steps 20 --radius 5 --radius 10 "
    "--radius 20 --zeta-db -20 --trials 100000 --seed 7 --out fig2.csv"
).split()

HEADER = "rho,r,theory_paper_db,theory_exact_db,sim_mean_db,sim_ci95_low_db,sim_ci95_high_db,abs_err,rel_err,within_ci,trials,seed"


def usage_error(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        parse_args(argv)
    assert exc.value.code == 2
    return capsys.readouterr().err


class TestParseArgs:
    def test_defaults(self):
        cfg = parse_args(["eval", "--rho", "0", "--radius", "10"])
        assert (cfg.w, cfg.w_r, cfg.zeta_db, cfg.trials, cfg.seed, cfg.format) == (0.5, 0.3, -20.0, 100_000, 42, "csv")
        assert cfg.s == pytest.approx(0.4)
        assert cfg.rho_values == [0.0] and cfg.radii == [10.0]

    def test_figure_sweep(self):
        cfg = parse_args(FIG2_ARGV)
        assert cfg.mode == "sweep"
        assert cfg.radii == [5.0, 10.0, 20.0]
        assert len(cfg.rho_values) == 20
        assert cfg.rho_values[0] == pytest.approx(0.01) and cfg.rho_values[-1] == pytest.approx(0.5)
        assert (cfg.seed, cfg.trials, cfg.out) == (7, 100_000, "fig2.csv")
        assert len(cfg.grid()) == 60

    def test_log_spacing(self):
        cfg = parse_args(["sweep", "--rho-spacing", "log", "--rho-steps", "3"])
        assert cfg.rho_values == pytest.approx([0.01, 0.5**0.5 * 0.1, 0.5])

    def test_radius_inside_s(self, capsys):
        assert "--radius" in usage_error(["sweep", "--radius", "0.1"], capsys)

    def test_unknown_flag(self, capsys):
        assert "--bogus" in usage_error(["eval", "--rho", "1", "--bogus"], capsys)

    def test_positive_zeta(self, capsys):
        assert "--zeta-db" in usage_error(["validate", "--zeta-db", "3"], capsys)

    @pytest.mark.parametrize(
        "argv,flag",
        [
            (["eval", "--rho", "-1"], "--rho"),
            (["eval", "--rho", "1", "--trials", "0"], "--trials"),
            (["eval", "--rho", "1", "--s", "0.1"], "--s"),
            (["sweep", "--rho-min", "0.5", "--rho-max", "0.1"], "--rho-max"),
            (["outage", "--rho", "0.1", "--threshold-db", "5"], "--threshold-db"),
        ],
    )
    def test_named_flag(self, argv, flag, capsys):
        assert flag in usage_error(argv, capsys)


def record(**kw):
    base = dict(
        rho=0.0, r=10.0, theory_paper=1.0, theory_exact=1.0, sim_mean=1.0, sim_std_error=0.0,
        sim_ci95_low=1.0, sim_ci95_high=1.0, abs_err=0.0, rel_err=0.0, within_ci=True,
        trials=1000, seed=5,
    )
    base.update(kw)
    return SweepRecord(**base)


class TestEmit:
    def test_csv_zero_row(self, tmp_path):
        path = tmp_path / "out.csv"
        emit_results([record()], "csv", str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == HEADER
        assert ",".join(CSV_FIELDS) == HEADER
        row = dict(zip(lines[0].split(","), lines[1].split(",")))
        assert float(row["theory_paper_db"]) == 0.0 and float(row["sim_mean_db"]) == 0.0
        assert row["within_ci"] == "true"

    def test_db_conversion_and_plain_decimals(self, tmp_path):
        path = tmp_path / "out.csv"
        emit_results([record(theory_paper=0.01, sim_mean=0.001, abs_err=1e-7, within_ci=False)], "csv", str(path))
        row = next(csv.DictReader(io.StringIO(path.read_text())))
        assert float(row["theory_paper_db"]) == pytest.approx(-20.0)
        assert float(row["sim_mean_db"]) == pytest.approx(-30.0)
        assert row["abs_err"] == "0.0000001"
        assert row["within_ci"] == "false"

    def test_json_round_trip(self, tmp_path):
        path = tmp_path / "out.json"
        recs = [record(), record(rho=0.25, theory_paper=0.3, sim_mean=0.31, abs_err=0.01, rel_err=0.0322)]
        emit_results(recs, "json", str(path))
        text = path.read_text()
        data = json.loads(text)
        assert list(data[0]) == list(CSV_FIELDS)
        assert format_json(data) == text

    def test_json_zero_bound_is_null(self):
        row = record_row(record(sim_ci95_low=0.0))
        assert json.loads(format_json([row]))[0]["sim_ci95_low_db"] is None

    def test_empty(self):
        with pytest.raises(ValueError):
            emit_results([], "csv", "-")


class TestMain:
    def test_eval_zero(self, tmp_path):
        out = tmp_path / "e.csv"
        assert main(["eval", "--rho", "0", "--radius", "10", "--trials", "100", "--out", str(out)]) == 0
        row = next(csv.DictReader(out.open()))
        assert float(row["theory_paper_db"]) == 0.0 and float(row["sim_mean_db"]) == 0.0

    def test_small_sweep_rows(self, tmp_path):
        out = tmp_path / "s.csv"
        argv = ["sweep", "--rho-steps", "4", "--radius", "5", "--radius", "10", "--radius", "20",
                "--trials", "200", "--out", str(out)]
        assert main(argv) == 0
        assert len(out.read_text().splitlines()) == 1 + 3 * 4

    def test_deterministic_files(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["sweep", "--rho-steps", "3", "--trials", "3000", "--chunk-size", "700"]
        main(argv + ["--out", str(a)])
        main(argv + ["--out", str(b), "--workers", "3"])
        assert a.read_bytes() == b.read_bytes()

    def test_outage(self, tmp_path):
        out = tmp_path / "o.csv"
        argv = ["outage", "--rho", "0", "--rho", "0.1", "--threshold-db", "-30", "--threshold-db", "0",
                "--radius", "10", "--trials", "2000", "--out", str(out)]
        assert main(argv) == 0
        rows = list(csv.DictReader(out.open()))
        assert list(rows[0]) == list(OUTAGE_FIELDS)
        assert len(rows) == 4
        assert float(rows[0]["theory"]) == 0.0 and float(rows[0]["empirical"]) == 0.0

    def test_io_error(self, capsys):
        code = main(["eval", "--rho", "0.1", "--trials", "10", "--out", "/nonexistent/dir/x.csv"])
        assert code == 1
        assert "/nonexistent/dir/x.csv" in capsys.readouterr().err

    def test_validate_small(self, capsys):
        assert main(["validate", "--trials", "2000"]) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out and "all" in out

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "mmblockage", "eval", "--rho", "0", "--trials", "10"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.splitlines()[0] == HEADER

    def test_module_usage_exit(self):
        proc = subprocess.run([sys.executable, "-m", "mmblockage", "sweep", "--radius", "0.1"],
                              capture_output=True, text=True)
        assert proc.returncode == 2
