import csv
import json
import math

import pytest

from eftqc.cli import EXIT_CONFIG, EXIT_DATA, EXIT_NONCONVERGENCE, EXIT_OK, main
from eftqc.models import ScalabilityModel, physical_error_rate


def run_cli(*argv):
    return main(list(argv))


def read_json(path):
    with open(path) as handle:
        return json.load(handle)


class TestReachCommand:
    def test_defaults_reproduce_headline(self, tmp_path):
        out = tmp_path / "run"
        assert run_cli("reach", "--out", str(out)) == EXIT_OK
        result = read_json(out / "result.json")
        assert result["numeric"] == 92
        assert 80 <= result["closed_form"] <= 100
        assert result["q_phys_opt"] == pytest.approx(1e7 / math.e**2, rel=1e-9)

    def test_burden_reduction_flag(self, tmp_path):
        out = tmp_path / "run"
        assert run_cli("reach", "--out", str(out), "--burden-reduction", "1e5") == EXIT_OK
        assert read_json(out / "result.json")["numeric"] > 200

    def test_closed_form_only_with_log_kind_is_config_error(self, tmp_path):
        code = run_cli(
            "reach",
            "--out",
            str(tmp_path / "run"),
            "--set",
            "scalability.kind=logarithmic",
            "--set",
            "scalability.p0=0.001",
            "--set",
            "scalability.scale=5",
            "--method",
            "closed_form",
        )
        assert code == EXIT_CONFIG

    def test_log_kind_numeric_works(self, tmp_path):
        out = tmp_path / "run"
        code = run_cli(
            "reach",
            "--out",
            str(out),
            "--set",
            "scalability.kind=logarithmic",
            "--set",
            "scalability.p0=0.001",
            "--set",
            "scalability.scale=5",
            "--method",
            "numeric",
        )
        assert code == EXIT_OK
        result = read_json(out / "result.json")
        assert result["closed_form"] is None
        assert result["numeric"] >= 1

    def test_above_threshold_is_config_error(self, tmp_path):
        # configured parameters that violate model preconditions fail at
        # config-build time, before any solver runs
        code = run_cli("reach", "--out", str(tmp_path / "run"), "--set", "scalability.p0=0.05")
        assert code == EXIT_CONFIG


class TestMsdCommand:
    def test_table_bit_exact(self, tmp_path):
        out = tmp_path / "run"
        assert run_cli("msd", "--out", str(out)) == EXIT_OK
        factories = read_json(out / "result.json")["factories"]
        assert factories["high"] == {
            "name": "(15-to-1)_{5,3,3}",
            "p_phys": 1e-4,
            "q_factory": 522,
            "p_out": 4.7e-6,
            "q_min_eftqc": 554,
            "p_L": 1e-5,
        }
        assert factories["lower"] == {
            "name": "(15-to-1)_{7,3,3}",
            "p_phys": 1e-3,
            "q_factory": 810,
            "p_out": 5.4e-4,
            "q_min_eftqc": 842,
            "p_L": 1e-3,
        }


class TestContourCommand:
    def test_csv_and_summary(self, tmp_path):
        out = tmp_path / "run"
        assert run_cli("contour", "--out", str(out), "--q-max", "120") == EXIT_OK
        result = read_json(out / "result.json")
        assert result["last_feasible_q_logical"] == 92
        with open(out / "contour.csv", newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["q_logical", "q_phys_required", "feasible"]
        assert len(rows) == 121
        feasible_flags = [row[2] == "True" for row in rows[1:]]
        assert sum(1 for a, b in zip(feasible_flags, feasible_flags[1:]) if a != b) == 1


class TestRegimesCommand:
    def test_device_cell_is_nisq(self, tmp_path):
        out = tmp_path / "run"
        assert run_cli("regimes", "--out", str(out)) == EXIT_OK
        with open(out / "regimes.csv", newline="") as handle:
            rows = list(csv.reader(handle))[1:]
        cell = min(
            rows, key=lambda row: abs(float(row[0]) - 1.75) + abs(float(row[1]) - 0.5)
        )
        assert float(cell[0]) == pytest.approx(1.75, abs=1e-9)
        assert float(cell[1]) == pytest.approx(0.5, abs=1e-9)
        assert float(cell[2]) == pytest.approx(2.0**1.75, rel=1e-9)
        assert cell[3] == "NISQ"

    def test_metadata_levels(self, tmp_path):
        out = tmp_path / "run"
        assert run_cli("regimes", "--out", str(out)) == EXIT_OK
        result = read_json(out / "result.json")
        assert result["contour_levels"] == [1e2, 1e4, 1e6, 1e8]


class TestFitCommand:
    @pytest.fixture
    def calibration_csv(self, tmp_path):
        model = ScalabilityModel.power_law(0.005, 1.75)
        path = tmp_path / "device.csv"
        lines = ["qubit_count,worst_two_qubit_error"]
        for q in (7, 27, 65, 127, 433):
            lines.append(f"{q},{physical_error_rate(model, q)!r}")
        path.write_text("\n".join(lines) + "\n")
        return path

    def test_fit_recovers_model(self, tmp_path, calibration_csv):
        out = tmp_path / "run"
        assert run_cli("fit", "--input", str(calibration_csv), "--out", str(out)) == EXIT_OK
        result = read_json(out / "result.json")
        best = result["reports"][0]["model"]
        assert best["kind"] == "power_law"
        assert best["p0"] == pytest.approx(0.005, rel=1e-9)
        assert best["scale"] == pytest.approx(1.75, rel=1e-9)

    def test_missing_input_is_data_error(self, tmp_path):
        code = run_cli("fit", "--input", str(tmp_path / "absent.csv"), "--out", str(tmp_path / "o"))
        assert code == EXIT_DATA

    def test_malformed_input_is_data_error(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("qubit_count,worst_two_qubit_error\n7,1.5\n")
        code = run_cli("fit", "--input", str(bad), "--out", str(tmp_path / "o"))
        assert code == EXIT_DATA


class TestRfeCommands:
    def test_sim_outputs(self, tmp_path):
        out = tmp_path / "run"
        code = run_cli("rfe-sim", "--preset", "reference-rfe", "--out", str(out), "--trials", "50")
        assert code == EXIT_OK
        result = read_json(out / "result.json")
        assert result["peak_index"] == 4  # theta = pi/4 on a J = 32 grid
        assert result["failure"]["trials"] == 50
        with open(out / "spectrum.csv", newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["j", "re", "im", "abs"]
        assert len(rows) == 33

    def test_manifest_round_trip_is_byte_identical(self, tmp_path):
        first = tmp_path / "a"
        second = tmp_path / "b"
        args = ["rfe-sim", "--trials", "40", "--set", "rfe.seed=2024"]
        assert run_cli(*args, "--out", str(first)) == EXIT_OK
        assert run_cli(
            "rfe-sim", "--trials", "40", "--config", str(first / "manifest.json"),
            "--out", str(second),
        ) == EXIT_OK
        assert (first / "result.json").read_bytes() == (second / "result.json").read_bytes()
        assert (first / "spectrum.csv").read_bytes() == (second / "spectrum.csv").read_bytes()

    def test_seed_flag_changes_outputs(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run_cli("rfe-sim", "--out", str(a), "--trials", "10", "--seed", "1") == EXIT_OK
        assert run_cli("rfe-sim", "--out", str(b), "--trials", "10", "--seed", "2") == EXIT_OK
        assert (a / "spectrum.csv").read_bytes() != (b / "spectrum.csv").read_bytes()

    def test_calibrate_roundtrip(self, tmp_path):
        out = tmp_path / "run"
        code = run_cli(
            "rfe-calibrate", "--out", str(out), "--trials-per-probe", "100",
            "--set", "rfe.K=16", "--set", "rfe.J=16",
        )
        assert code == EXIT_OK
        assert read_json(out / "result.json")["M"] >= 1

    def test_calibrate_budget_exhaustion(self, tmp_path):
        code = run_cli(
            "rfe-calibrate", "--out", str(tmp_path / "run"),
            "--set", "rfe.noise.kind=exp_decay", "--set", "rfe.noise.lambda=3.0",
            "--set", "rfe.K=16", "--set", "rfe.J=16",
            "--delta", "0.01", "--trials-per-probe", "50", "--m-ceiling", "64",
        )
        assert code == EXIT_NONCONVERGENCE


class TestErrorSurface:
    def test_unknown_key_is_config_error(self, tmp_path):
        assert run_cli("reach", "--out", str(tmp_path / "o"), "--set", "bogus=1") == EXIT_CONFIG

    def test_error_json_on_stdout(self, tmp_path, capsys):
        run_cli("reach", "--out", str(tmp_path / "o"), "--set", "bogus=1")
        payload = json.loads(capsys.readouterr().out)
        assert payload["error"]["type"] == "ConfigError"
