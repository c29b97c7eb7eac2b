import json
from copy import deepcopy

import numpy as np
import pandas as pd
from scipy import stats

from config import (
    CONFIG_SCHEMA_VERSION,
    GRID_N,
    MEAN_TOLERANCE,
    RANDOM_STATE,
    RESULTS_DIR,
    SIMULATION_DEFAULTS,
    SOLVER_DEFAULTS,
    XI_GRID_N,
)
from .costs import ModelParams, cost_assumption_violations, cost_from_dict
from .errors import ModelValidationError
from .kernel import XiSpec, dual_cell_edges, state_grid
from .measures import GridMeasure
from .results import load_json, save_json

# Assumptions every run needs; the others only gate uniqueness arguments
REQUIRED_COST_PROPERTIES = ("increasing_in_x", "nonnegative", "positive_coupling")


def initial_measure(spec, m0, n):
    """Build mu0 from its config descriptor and check that its mean is m0."""
    kind = spec.get("kind", "atom0")
    if kind == "atom0":
        mu0 = GridMeasure.unit_atom(n)
    elif kind == "point":
        mu0 = GridMeasure.point_mass(float(spec.get("x", m0)), n)
    elif kind == "uniform":
        mu0 = GridMeasure.uniform(n)
    elif kind == "beta":
        edges = dual_cell_edges(state_grid(n))
        masses = np.diff(stats.beta(spec["a"], spec["b"]).cdf(edges))
        atom0 = spec.get("atom0", 0.0)
        mu0 = GridMeasure.from_masses(masses * (1 - atom0), atom0)
    elif kind == "csv":
        frame = pd.read_csv(spec["path"])
        if len(frame) != n:
            raise ModelValidationError(
                f"mu0 file has {len(frame)} rows but the state grid has {n} nodes"
            )
        mu0 = GridMeasure(frame["atom0"].iloc[0], frame["density"].values)
    else:
        raise ModelValidationError(f"Unknown mu0 kind '{kind}'")

    try:
        mu0.check()
    except ValueError as e:
        raise ModelValidationError(f"mu0 is not a probability measure: {e}")
    if abs(mu0.mean() - m0) > MEAN_TOLERANCE:
        raise ModelValidationError(
            f"mu0 has mean {mu0.mean():.8g} but m0 is {m0} "
            f"(tolerance {MEAN_TOLERANCE})"
        )
    return mu0


class ExperimentConfig:
    def __init__(self, data):
        self.data = deepcopy(data)
        version = self.data.setdefault("schema_version", CONFIG_SCHEMA_VERSION)
        if version != CONFIG_SCHEMA_VERSION:
            raise ModelValidationError(
                f"Unsupported config schema version {version}, "
                f"expected {CONFIG_SCHEMA_VERSION}"
            )
        try:
            model = self.data["model"]
            self.data["xi"] = self.data.get("xi", {"family": "uniform", "params": {}})
            self.data["mu0"] = self.data.get("mu0", {"kind": "atom0"})
            self.data["solver"] = {**SOLVER_DEFAULTS, **self.data.get("solver", {})}
            self.data["simulation"] = {
                **SIMULATION_DEFAULTS,
                **self.data.get("simulation", {}),
            }
            self.data.setdefault("seed", RANDOM_STATE)
            self.data.setdefault("output_dir", RESULTS_DIR)
            self.data.setdefault("threads", 1)
            model.setdefault("grid_n", GRID_N)
            model.setdefault("xi_grid_n", XI_GRID_N)

            if model["gamma"] <= 0:
                raise ModelValidationError(
                    f"gamma must be positive, got {model['gamma']}"
                )
            self.params = ModelParams(
                rho=model["rho"],
                gamma=model["gamma"],
                T=model["T"],
                m0=model["m0"],
                cost=cost_from_dict(model["cost"]),
                grid_n=model["grid_n"],
                xi_grid_n=model["xi_grid_n"],
            )
            self.xi = XiSpec.from_dict(self.data["xi"])
        except (KeyError, TypeError) as e:
            raise ModelValidationError(f"Malformed config: missing or invalid {e}")

        self.cost_violations = cost_assumption_violations(
            self.params.cost, self.params.grid
        )
        required = [v for v in self.cost_violations if v in REQUIRED_COST_PROPERTIES]
        if required:
            raise ModelValidationError(f"Cost function violates: {', '.join(required)}")
        self.mu0 = initial_measure(self.data["mu0"], self.params.m0, self.params.grid_n)

    @classmethod
    def load(cls, path, out=None, threads=None, seed=None):
        try:
            data = load_json(path)
        except (OSError, json.JSONDecodeError) as e:
            raise ModelValidationError(f"Cannot read config {path}: {e}")
        for key, value in (("output_dir", out), ("threads", threads), ("seed", seed)):
            if value is not None:
                data[key] = value
        return cls(data)

    @property
    def solver(self):
        return self.data["solver"]

    @property
    def simulation(self):
        return self.data["simulation"]

    @property
    def seed(self):
        return self.data["seed"]

    @property
    def threads(self):
        return self.data["threads"]

    @property
    def output_dir(self):
        return self.data["output_dir"]

    @property
    def satisfies_uniqueness_assumptions(self):
        return not self.cost_violations

    def to_dict(self):
        return deepcopy(self.data)

    def save(self, results_dir=None):
        results_dir = self.output_dir if results_dir is None else results_dir
        return save_json(self.to_dict(), results_dir, "config.json")


def load_experiment(config, out=None, threads=None, seed=None):
    """Load and validate a config for a command; prints the reason and returns None on failure."""
    try:
        experiment = ExperimentConfig.load(config, out, threads, seed)
    except ModelValidationError as e:
        print(f"Invalid configuration: {e}")
        return None
    print(f"Configuration: {config}")
    print(f"Results directory: {experiment.output_dir}")
    experiment.save()
    return experiment
