import json

import pytest

from utils import BetaXi, ModelParams, ProductCost, UniformXi


def polynomial(*coefficients):
    return {"kind": "polynomial", "coefficients": list(coefficients)}


@pytest.fixture
def uniform_xi():
    return UniformXi()


@pytest.fixture
def beta_xi():
    return BetaXi(a=2, b=2)


@pytest.fixture
def make_params():
    """Product-cost model on a small grid; R1 and R2 given as polynomial coefficients."""

    def make(
        rho=0.9,
        gamma=1.0,
        T=10,
        m0=0.0,
        r1=(0.0, 1.0),
        r2=(1.0, 1.0),
        grid_n=201,
        xi_grid_n=201,
    ):
        cost = ProductCost(polynomial(*r1), polynomial(*r2))
        return ModelParams(rho, gamma, T, m0, cost, grid_n, xi_grid_n)

    return make


@pytest.fixture
def write_config(tmp_path):
    """Writes a labmate-style config with small grids into tmp_path, with overrides."""

    def write(name="labmate", grid_n=401, model=None, simulation=None, **sections):
        data = {
            "schema_version": 1,
            "model": {
                "rho": 0.9,
                "gamma": 1.0,
                "T": 10,
                "m0": 0.0,
                "grid_n": grid_n,
                "xi_grid_n": grid_n,
                "cost": {
                    "form": "product",
                    "r1": polynomial(0.0, 1.0),
                    "r2": polynomial(1.0, 1.0),
                },
            },
            "xi": {"family": "uniform", "params": {}},
            "mu0": {"kind": "atom0"},
            "simulation": {
                "n_cycles": 20000,
                "n_batches": 50,
                "path_horizon": 200000,
                "replications": 20,
                "horizon": 200,
            },
            "seed": 7,
            "output_dir": str(tmp_path / "results" / name),
        }
        data["model"].update(model or {})
        data["simulation"].update(simulation or {})
        data.update(sections)
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(data))
        return str(path)

    return write
