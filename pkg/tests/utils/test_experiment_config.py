import os

import numpy as np
import pytest

from config import SOLVER_DEFAULTS
from utils import (
    ExperimentConfig,
    ModelValidationError,
    initial_measure,
    load_experiment,
    load_json,
)


def test_load_labmate(write_config):
    experiment = ExperimentConfig.load(write_config())
    assert experiment.params.rho == 0.9
    assert experiment.params.grid_n == 401
    assert experiment.xi.family == "uniform"
    assert experiment.mu0.atom0 == 1.0
    assert experiment.seed == 7
    assert experiment.satisfies_uniqueness_assumptions
    assert experiment.solver["damping"] == SOLVER_DEFAULTS["damping"]


def test_command_line_overrides(write_config, tmp_path):
    experiment = ExperimentConfig.load(
        write_config(), out=str(tmp_path / "elsewhere"), threads=3, seed=11
    )
    assert experiment.output_dir == str(tmp_path / "elsewhere")
    assert experiment.threads == 3
    assert experiment.seed == 11


@pytest.mark.parametrize(
    "model, message",
    [
        ({"rho": 1.2}, "rho"),
        ({"gamma": 0.0}, "gamma"),
        ({"T": -2}, "T must"),
        ({"cost": {"form": "product", "r1": {"kind": "polynomial", "coefficients": [1, -1]},
                   "r2": {"kind": "constant", "value": 1}}}, "increasing_in_x"),
        ({"cost": {"form": "product", "r1": {"kind": "polynomial", "coefficients": [0, 1]},
                   "r2": {"kind": "constant", "value": -1}}}, "positive_coupling"),
    ],
)
def test_invalid_model(write_config, model, message):
    with pytest.raises(ModelValidationError, match=message):
        ExperimentConfig.load(write_config(model=model))


def test_decreasing_coupling_is_only_flagged(write_config):
    model = {
        "cost": {
            "form": "product",
            "r1": {"kind": "polynomial", "coefficients": [0, 1]},
            "r2": {"kind": "polynomial", "coefficients": [2, -1]},
        }
    }
    experiment = ExperimentConfig.load(write_config(model=model))
    assert experiment.cost_violations == ["increasing_coupling"]
    assert not experiment.satisfies_uniqueness_assumptions


def test_schema_version(write_config):
    with pytest.raises(ModelValidationError, match="schema version"):
        ExperimentConfig.load(write_config(schema_version=2))


def test_missing_file(tmp_path):
    with pytest.raises(ModelValidationError):
        ExperimentConfig.load(str(tmp_path / "missing.json"))


def test_initial_measures():
    assert initial_measure({"kind": "uniform"}, 0.5, 101).mean() == pytest.approx(0.5)
    assert initial_measure({"kind": "point", "x": 0.3}, 0.3, 101).mean() == pytest.approx(0.3)
    beta = initial_measure({"kind": "beta", "a": 2, "b": 2}, 0.5, 201)
    assert np.isclose(beta.total_mass, 1.0)
    with pytest.raises(ModelValidationError, match="mean"):
        initial_measure({"kind": "uniform"}, 0.2, 101)
    with pytest.raises(ModelValidationError):
        initial_measure({"kind": "gaussian"}, 0.0, 101)


def test_initial_measure_from_csv(tmp_path):
    path = tmp_path / "mu0.csv"
    measure = initial_measure({"kind": "uniform"}, 0.5, 11)
    measure.to_frame().to_csv(path, index=False)
    loaded = initial_measure({"kind": "csv", "path": str(path)}, 0.5, 11)
    assert np.allclose(loaded.density, measure.density)
    with pytest.raises(ModelValidationError, match="rows"):
        initial_measure({"kind": "csv", "path": str(path)}, 0.5, 21)


def test_load_experiment_saves_config(write_config):
    experiment = load_experiment(write_config())
    saved = load_json(os.path.join(experiment.output_dir, "config.json"))
    assert saved["solver"] == experiment.solver
    assert saved["model"]["rho"] == 0.9


def test_load_experiment_reports_invalid_config(write_config, capsys):
    assert load_experiment(write_config(model={"rho": 1.2})) is None
    assert "rho must lie in (0, 1), got 1.2" in capsys.readouterr().out
