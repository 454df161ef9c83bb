"""Pruebas de la interfaz de línea de comandos"""

import json
from pathlib import Path

import pytest

from infrastructure.adapters.csv_result_writer import read_rows
from infrastructure.adapters.ensemble_binary_exporter import load_binary
from infrastructure.adapters.index_set_text_repository import IndexSetTextRepository
from infrastructure.cli.main import EXIT_CONFIG, EXIT_FAILURE, EXIT_OK, main
from infrastructure.config.gradcs_config import GradCSSettings

MINIMAL = Path(__file__).resolve().parents[1] / "experiments" / "minimal.json"

@pytest.fixture
def settings(tmp_path):
    return GradCSSettings(_env_file=None, output_dir=str(tmp_path / "results"), log_level="WARNING")

def run(args, settings):
    return main(["--log-level", "WARNING", *args], settings)

class TestRun:

    def test_minimal_config(self, tmp_path, settings):
        out = tmp_path / "out"
        assert run(["run", str(MINIMAL), "--out", str(out)], settings) == EXIT_OK
        rows = read_rows(str(out / "results.csv"))
        assert len(rows) == 1
        assert rows[0]["m_budget"] == "6"
        assert "wall_time" not in rows[0]
        timings = read_rows(str(out / "timings.csv"))
        assert len(timings) == 1 and float(timings[0]["wall_time"]) >= 0.0
        for name in ("config.json", "aggregate.csv", "series_h1.csv", "series_linf.csv",
                     "timings.csv", "seeds.json"):
            assert (out / name).exists()
        assert "error_grid" in json.loads((out / "seeds.json").read_text())

    def test_results_are_byte_identical(self, tmp_path, settings):
        first, second = tmp_path / "a", tmp_path / "b"
        assert run(["run", str(MINIMAL), "--out", str(first)], settings) == EXIT_OK
        assert run(["run", str(MINIMAL), "--out", str(second)], settings) == EXIT_OK
        assert (first / "results.csv").read_bytes() == (second / "results.csv").read_bytes()

    def test_seed_override(self, tmp_path, settings):
        out = tmp_path / "seeded"
        assert run(["run", str(MINIMAL), "--seed", "99", "--out", str(out)], settings) == EXIT_OK
        assert json.loads((out / "config.json").read_text())["seed"] == 99

    def test_export_ensembles(self, tmp_path, settings):
        out = tmp_path / "exported"
        assert run(["run", str(MINIMAL), "--out", str(out), "--export-ensembles"], settings) == EXIT_OK
        index_set = IndexSetTextRepository().load_index_set(str(out / "index_set.txt"))
        assert len(index_set) == 8
        binary = out / "ensembles" / "full_gradient_theta1_m6.bin"
        assert binary.exists()
        header, matrix, rhs = load_binary(str(binary))
        assert (header["rows"], header["columns"]) == (9, 8)
        assert matrix.shape == (9, 8) and rhs.shape == (9,)
        seeds = json.loads((out / "seeds.json").read_text())
        assert header["seed"] == seeds["full_gradient|theta=1|m_tilde=6|trial=0"]

    def test_invalid_config(self, tmp_path, settings, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"d": 2, "s": 3, "trials": 0}, indent=2))
        assert run(["run", str(bad)], settings) == EXIT_CONFIG
        assert f"{bad}:" in capsys.readouterr().err

    @pytest.mark.parametrize("extra", [[], ["--preset", "gain-exp-legendre"], ["--jobs", "0"]])
    def test_argument_errors(self, settings, extra):
        args = ["run"] + ([str(MINIMAL)] if extra else []) + extra
        assert run(args, settings) == EXIT_CONFIG

class TestTheory:

    def test_table_and_csv(self, tmp_path, settings, capsys):
        csv_path = tmp_path / "theory.csv"
        code = run(["theory", "--family", "chebyshev", "--d", "3", "--s", "4", "--k-mode", "bound",
                    "--csv", str(csv_path)], settings)
        assert code == EXIT_OK
        assert "gradient_augmented" in capsys.readouterr().out
        rows = read_rows(str(csv_path))
        assert [row["setting"] for row in rows] == ["gradient_augmented", "unaugmented"]
        factors = dict(item.split("=") for item in rows[0]["factors"].split(";"))
        assert float(factors["K"]) == pytest.approx(9.0)

    def test_missing_dimension(self, settings):
        assert run(["theory", "--family", "legendre", "--s", "4"], settings) == EXIT_CONFIG

    def test_unsupported_setting(self, settings):
        args = ["theory", "--family", "legendre", "--d", "2", "--s", "3", "--settings", "fourier"]
        assert run(args, settings) == EXIT_CONFIG

class TestValidate:

    def test_suite_passes(self, tmp_path, settings, capsys):
        report = tmp_path / "report.csv"
        assert run(["validate", "hyperbolic-cross", "--out", str(report)], settings) == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines and all(line.endswith("PASS") for line in lines)
        assert len(read_rows(str(report))) == len(lines)

    def test_unknown_suite(self, settings):
        assert run(["validate", "nope"], settings) == EXIT_CONFIG

    def test_failure_exit_code(self, settings, monkeypatch):
        from application.dto.experiment_dto import ValidationCheck
        from application.use_cases import validation_use_case

        failing = ValidationCheck(suite="demo", name="x", measured=2.0, threshold=1.0, passed=False)
        monkeypatch.setitem(validation_use_case.SUITES, "demo", lambda: [failing])
        assert run(["validate", "demo"], settings) == EXIT_FAILURE
