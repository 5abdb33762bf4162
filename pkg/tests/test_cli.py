"""End-to-end tests of the command-line interface."""

import csv
import json

import pytest

from icbargain import __version__
from icbargain.cli import EXIT_INVALID, EXIT_NON_REGULAR, EXIT_OK, main, parse_args
from icbargain.log import setup_logging
from icbargain.report import load_report, parse_rate

MIXED = ["--a", "0.2", "--b", "1.2", "--snr1-db", "10", "--snr2-db", "20"]


@pytest.fixture(autouse=True)
def no_user_config(tmp_path, monkeypatch):
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path / "xdg"))


def read_json(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


class TestArgs:
    def test_flags(self):
        parsed = parse_args(["sweep", *MIXED, "--p1-from", "0.1", "--joint"])
        assert parsed.command == "sweep"
        assert parsed.a == 0.2
        assert parsed.snr2_db == 20.0
        assert parsed.p1_from == 0.1
        assert parsed.joint is True
        assert parsed.svg is None

    def test_version(self, capsys):
        assert main(["--version"]) == EXIT_OK
        assert __version__ in capsys.readouterr().out

    def test_unknown_flag(self):
        assert main(["bargain", "--bogus"]) == EXIT_INVALID

    def test_missing_command(self):
        assert main([]) == EXIT_INVALID


class TestBargain:
    def test_mixed(self, tmp_path):
        out = tmp_path / "out"
        assert main(["bargain", *MIXED, "--p1", "0.5", "--p2", "0.5", "-o", str(out)]) == EXIT_OK
        record = read_json(out / "outcome.json")
        assert record["status"] == "agreed"
        assert record["regular"] is True
        assert float(record["phase1"]["split"]["beta"]) == pytest.approx(0.05)
        assert parse_rate(record["operating_point"]) == parse_rate(record["spe"]["r_bar"])
        assert (out / "bargain.svg").exists()
        assert [row["point"] for row in read_csv(out / "outcome.csv")] == [
            "disagreement", "nbs", "r_bar", "r_tilde", "operating_point",
        ]

    def test_log_file_keeps_debug_trace(self, tmp_path, capsys):
        log = tmp_path / "logs" / "bargain.txt"
        assert main(["bargain", *MIXED, "-o", str(tmp_path / "out"), "--log-file", str(log)]) == EXIT_OK
        setup_logging()
        text = log.read_text(encoding="utf-8")
        assert "[INFO] Phase 1 (hk)" in text
        assert "[DEBUG] H-K bounds for" in text
        assert "[DEBUG]" not in capsys.readouterr().out

    def test_report(self, tmp_path):
        out = tmp_path / "out"
        main(["bargain", *MIXED, "--no-svg", "-o", str(out)])
        report = load_report(out)
        assert report.exit_status == EXIT_OK
        assert report.inputs.P2 == 100.0
        assert report.inputs.command == "bargain"
        assert str(out / "outcome.json") in report.artifacts
        assert not (out / "bargain.svg").exists()
        assert (out / "bargain.log").exists()

    def test_non_regular(self, tmp_path, capsys):
        args = ["bargain", "--a", "1.5", "--b", "1.5", "--snr1-db", "10", "--snr2-db", "20",
                "--solution", "spe", "--no-svg", "-o", str(tmp_path)]
        assert main(args) == EXIT_NON_REGULAR
        assert "Refused" in capsys.readouterr().out
        assert read_json(tmp_path / "outcome.json")["status"] == "non_regular"

    def test_non_regular_with_nbs(self, tmp_path):
        args = ["bargain", "--a", "1.5", "--b", "1.5", "--snr1-db", "10", "--snr2-db", "20",
                "--no-svg", "-o", str(tmp_path)]
        assert main(args) == EXIT_OK

    @pytest.mark.parametrize("extra", [
        ["--p1", "1.5"],
        ["--p2", "0"],
        ["--a", "-1"],
    ])
    def test_invalid_values(self, tmp_path, extra, capsys):
        assert main(["bargain", *MIXED, *extra, "-o", str(tmp_path)]) == EXIT_INVALID
        assert "Error" in capsys.readouterr().err

    def test_missing_gain(self, tmp_path):
        assert main(["bargain", "--a", "0.2", "--snr1-db", "10", "--snr2-db", "20",
                     "-o", str(tmp_path)]) == EXIT_INVALID

    def test_repeatable(self, tmp_path):
        for name in ("one", "two"):
            assert main(["bargain", *MIXED, "-o", str(tmp_path / name)]) == EXIT_OK
        for artifact in ("outcome.csv", "outcome.json", "bargain.svg"):
            assert (tmp_path / "one" / artifact).read_bytes() == (tmp_path / "two" / artifact).read_bytes()

    def test_scenario_file_with_override(self, tmp_path):
        path = tmp_path / "scenario.toml"
        path.write_text('a = 0.2\nb = 1.2\nsnr1_db = 10\nsnr2_db = 20\np1 = 0.1\nsolution = "spe"\n')
        out = tmp_path / "out"
        assert main(["bargain", "-s", str(path), "--p2", "0.3", "--no-svg", "-o", str(out)]) == EXIT_OK
        inputs = load_report(out).inputs
        assert (inputs.p1, inputs.p2, inputs.solution) == (0.1, 0.3, "spe")

    def test_bad_scenario_file(self, tmp_path, capsys):
        path = tmp_path / "scenario.toml"
        path.write_text("a = 0.2\nsnr = 10\n")
        assert main(["bargain", "-s", str(path), "-o", str(tmp_path)]) == EXIT_INVALID
        assert "line 2" in capsys.readouterr().err


class TestOtherCommands:
    def test_region(self, tmp_path):
        assert main(["region", *MIXED, "-o", str(tmp_path)]) == EXIT_OK
        record = read_json(tmp_path / "region.json")
        assert record["regime"] == "mixed"
        assert record["essential"] and record["regular"]
        kinds = {row["kind"] for row in read_csv(tmp_path / "region.csv")}
        assert kinds == {"vertex", "disagreement", "frontier"}
        assert (tmp_path / "region.svg").exists()

    def test_region_tdm(self, tmp_path):
        assert main(["region", *MIXED, "--scheme", "tdm", "--no-svg", "-o", str(tmp_path)]) == EXIT_OK
        assert len(read_json(tmp_path / "region.json")["frontier"]) == 101

    def test_sweep(self, tmp_path):
        args = ["sweep", *MIXED, "--p1-from", "0.1", "--p1-to", "0.9", "--p1-step", "0.1",
                "--p2", "0.5", "-o", str(tmp_path)]
        assert main(args) == EXIT_OK
        rows = read_csv(tmp_path / "sweep.csv")
        assert len(rows) == 9
        assert rows[0]["p1"] == "0.100000"
        r_bar1 = [float(row["r_bar1"]) for row in rows]
        assert all(b > a for a, b in zip(r_bar1, r_bar1[1:]))
        assert all(row["regular"] == "true" and row["error"] == "" for row in rows)

    def test_sweep_bad_grid(self, tmp_path):
        args = ["sweep", *MIXED, "--p1-from", "0.5", "--p1-to", "1.0", "--p1-step", "0.25",
                "-o", str(tmp_path)]
        assert main(args) == EXIT_INVALID

    def test_simulate(self, tmp_path):
        args = ["simulate", *MIXED, "--trials", "200", "--seed", "3", "--grid-size", "51",
                "-o", str(tmp_path)]
        assert main(args) == EXIT_OK
        record = read_json(tmp_path / "simulate.json")
        assert record["monte_carlo"]["agreements"] == 200
        assert record["play"]["round"] == 1
        assert max(float(g) for g in record["deviation"]["gains"].values()) <= 1e-9
        assert read_csv(tmp_path / "rounds.csv") == [{"round": "1", "agreements": "200", "breakdowns": "0"}]

    def test_simulate_non_regular(self, tmp_path):
        args = ["simulate", "--a", "1.5", "--b", "1.5", "--snr1-db", "10", "--snr2-db", "20",
                "-o", str(tmp_path)]
        assert main(args) == EXIT_NON_REGULAR

    def test_compare(self, tmp_path):
        args = ["compare", "--a", "0.1", "--b", "1.2", "--snr1-db", "20", "--snr2-db", "30",
                "-o", str(tmp_path)]
        assert main(args) == EXIT_OK
        record = read_json(tmp_path / "compare.json")
        assert record["verdict"] == "hk_dominates"
        assert record["preferences"] == {"u1": "hk", "u2": "hk"}
        assert (tmp_path / "compare.svg").exists()

    def test_compare_mac(self, tmp_path):
        args = ["compare", "--scheme", "mac", "--snr1-db", "20", "--snr2-db", "15", "-o", str(tmp_path)]
        assert main(args) == EXIT_INVALID
