"""Pruebas de los DTOs, preajustes y del servicio de carga de configuraciones"""

import json

import pytest
from pydantic import ValidationError

from application.dto.experiment_dto import (
    ExperimentConfig, ModeSpec, ResultRow, SolverOverrides, TheoryRequest, ValidationCheck
)
from domain.entities.domain import BasisFamily, ConfigurationError, SamplingKind, SolverConfig
from infrastructure.data.preset_experiments import (
    DESK_SCALE, GRADIENT_FRACTIONS, REFERENCE_SCALES, get_preset, get_preset_names
)
from infrastructure.services.experiment_loader_service import (
    create_experiment_loader_service, locate_field
)

BASE = {"name": "demo", "function": "F3", "d": 2, "s": 3}

def result_row(**overrides):
    payload = dict(experiment="demo", function="F3", family="legendre", density="uniform", d=2, s=3,
                   mode="full_gradient", theta=1.0, eta=0.0, seed=1, trial=0, m_budget=6, m=3,
                   m_o=3, m_g=3, m_tilde=6, h1_error=0.1, linf_error=0.2, status="optimal",
                   iterations=5, wall_time=0.01)
    payload.update(overrides)
    return ResultRow(**payload)

class TestExperimentConfig:

    def test_defaults(self):
        config = ExperimentConfig(**BASE)
        assert config.modes[0].kind == SamplingKind.FULL_GRADIENT
        assert config.thetas == [1.0]
        assert config.family_domain() == BasisFamily.legendre()

    @pytest.mark.parametrize("changes", [
        {"d": 0},
        {"thetas": [-1.0]},
        {"m_tilde_grid": [0]},
        {"function": "F2", "d": 3},
        {"family": {"kind": "fourier"}, "density": "chebyshev"},
        {"modes": []},
        {"unknown": 1},
    ])
    def test_rejects_invalid(self, changes):
        with pytest.raises(ValidationError):
            ExperimentConfig(**{**BASE, **changes})

    def test_mode_labels(self):
        assert ModeSpec(kind="fractional_gradient", fraction=0.25).label == "fractional_gradient(0.25)"
        assert ModeSpec(kind="unaugmented").label == "unaugmented"

    def test_solver_overrides(self):
        config = SolverOverrides(max_iterations=50, polish=False).apply(SolverConfig())
        assert config.max_iterations == 50
        assert not config.polish
        assert config.feasibility_tol == SolverConfig().feasibility_tol

    def test_round_trip_through_loader(self):
        loader = create_experiment_loader_service()
        config = ExperimentConfig(**BASE, thetas=[0.0, 1.0], m_tilde_grid=[4, 8])
        assert loader.load_text(loader.dump(config)) == config

class TestRows:

    def test_cost_must_add_up(self):
        with pytest.raises(ValidationError):
            result_row(m_tilde=7)

    def test_wall_time_is_not_deterministic(self):
        columns = ResultRow.deterministic_columns()
        assert "wall_time" not in columns
        assert columns[0] == "schema_version"
        assert "m_budget" in columns

    def test_validation_line(self):
        line = ValidationCheck(suite="kappa", name="ratio", measured=0.5, threshold=1.0, passed=True).to_line()
        assert line.startswith("kappa\tratio\t")
        assert line.endswith("PASS")

    def test_theory_request_eps_range(self):
        with pytest.raises(ValidationError):
            TheoryRequest(d=2, s=3, eps=1.5)

class TestPresets:

    def test_all_presets_validate(self):
        for name in get_preset_names():
            config = get_preset(name, trials=2)
            assert (config.d, config.s) == DESK_SCALE
            assert config.trials == 2

    @pytest.mark.parametrize("dimension", sorted(REFERENCE_SCALES))
    def test_reference_scales(self, dimension):
        config = get_preset("gain-exp-legendre", dimension)
        assert config.s == REFERENCE_SCALES[dimension]

    def test_chebyshev_presets_sample_chebyshev(self):
        assert get_preset("gain-peak-chebyshev").density.value == "chebyshev"
        assert get_preset("gain-peak-legendre").density.value == "uniform"

    def test_fractional_modes(self):
        config = get_preset("fractional-legendre")
        assert [mode.fraction for mode in config.modes] == GRADIENT_FRACTIONS

    def test_unknown_preset(self):
        with pytest.raises(KeyError):
            get_preset("missing")
        with pytest.raises(ConfigurationError) as info:
            create_experiment_loader_service().load_preset("missing")
        assert any("gain-exp-legendre" in line for line in info.value.diagnostics)

class TestLoaderDiagnostics:

    def test_locate_field(self):
        text = '{\n  "name": "x",\n  "solver": {\n    "max_iterations": 0\n  }\n}'
        assert locate_field(text, ("solver", "max_iterations")) == 4
        assert locate_field(text, ("missing",)) == 1

    def test_invalid_field_reports_line(self):
        text = json.dumps({**BASE, "trials": 0}, indent=2)
        with pytest.raises(ConfigurationError) as info:
            create_experiment_loader_service().load_text(text, "demo.json")
        line = next(i for i, row in enumerate(text.splitlines(), start=1) if '"trials"' in row)
        assert info.value.diagnostics[0].startswith(f"demo.json:{line}: trials:")

    def test_malformed_json(self):
        with pytest.raises(ConfigurationError) as info:
            create_experiment_loader_service().load_text('{\n  "d": 2,\n  oops\n}', "bad.json")
        assert info.value.diagnostics[0].startswith("bad.json:3:")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            create_experiment_loader_service().load_file(str(tmp_path / "none.json"))

    def test_theory_request(self):
        request = create_experiment_loader_service().load_theory_request(
            '{"family": {"kind": "chebyshev"}, "d": 3, "s": 4, "k_mode": "bound"}')
        assert request.family_domain() == BasisFamily.chebyshev()
