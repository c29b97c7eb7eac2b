from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from scipy.interpolate import RegularGridInterpolator, interp1d

from config import GRID_N, XI_GRID_N
from .errors import ModelValidationError
from .kernel import get_operator, state_grid


class ScalarFunction:
    """Function on [0, 1] given as polynomial coefficients, a constant or a table."""

    def __init__(self, spec):
        self.spec = dict(spec)
        kind = self.spec.get("kind")
        if kind == "polynomial":
            self.function = Polynomial(self.spec["coefficients"])
        elif kind == "constant":
            value = float(self.spec["value"])
            self.function = lambda x: np.full(np.shape(x), value)
        elif kind == "table":
            x, y = np.asarray(self.spec["x"], float), np.asarray(self.spec["y"], float)
            if x.min() > 0 or x.max() < 1:
                raise ModelValidationError("A tabulated function must cover [0, 1]")
            self.function = interp1d(x, y)
        else:
            raise ModelValidationError(f"Unknown function kind '{kind}'")

    def __call__(self, x):
        return np.asarray(self.function(np.asarray(x, dtype=float)), dtype=float)

    @property
    def is_constant(self):
        if self.spec["kind"] == "constant":
            return True
        if self.spec["kind"] == "polynomial":
            return not np.any(np.asarray(self.spec["coefficients"][1:], float))
        return bool(np.ptp(self.spec["y"]) == 0)

    def to_dict(self):
        return dict(self.spec)


class ProductCost:
    form = "product"
    is_product = True

    def __init__(self, r1, r2):
        self.r1 = r1 if isinstance(r1, ScalarFunction) else ScalarFunction(r1)
        self.r2 = r2 if isinstance(r2, ScalarFunction) else ScalarFunction(r2)

    def __call__(self, x, z):
        return self.r1(x) * self.r2(z)

    @property
    def depends_on_z(self):
        return not self.r2.is_constant

    def to_dict(self):
        return {"form": self.form, "r1": self.r1.to_dict(), "r2": self.r2.to_dict()}


class TableCost:
    """R(x, z) bilinearly interpolated from a table over an (x, z) grid."""

    form = "table"
    is_product = False

    def __init__(self, x, z, values):
        self.x = np.asarray(x, dtype=float)
        self.z = np.asarray(z, dtype=float)
        self.values = np.asarray(values, dtype=float)
        for name, axis in (("x", self.x), ("z", self.z)):
            if axis.min() > 0 or axis.max() < 1:
                raise ModelValidationError(f"Cost table {name} axis must cover [0, 1]")
        self.interpolator = RegularGridInterpolator((self.x, self.z), self.values)

    def __call__(self, x, z):
        x, z = np.broadcast_arrays(np.asarray(x, float), np.asarray(z, float))
        points = np.stack([x.ravel(), z.ravel()], axis=-1)
        return self.interpolator(points).reshape(x.shape)

    @property
    def depends_on_z(self):
        return bool(np.any(np.ptp(self.values, axis=1) > 0))

    def to_dict(self):
        return {
            "form": self.form,
            "x": self.x.tolist(),
            "z": self.z.tolist(),
            "values": self.values.tolist(),
        }


class GeneralCost:
    form = "general"
    is_product = False

    def __init__(self, function, depends_on_z=True):
        self.function = function
        self.depends_on_z = depends_on_z

    def __call__(self, x, z):
        x, z = np.broadcast_arrays(np.asarray(x, float), np.asarray(z, float))
        return np.asarray(self.function(x, z), dtype=float)

    def to_dict(self):
        raise NotImplementedError("A closure cost cannot be written to a config file")


def cost_from_dict(spec):
    form = spec.get("form")
    if form == "product":
        return ProductCost(spec["r1"], spec["r2"])
    if form == "table":
        return TableCost(spec["x"], spec["z"], spec["values"])
    raise ModelValidationError(f"Unknown cost form '{form}'")


def cost_assumption_violations(cost, grid=None, n_z=11):
    """Names of the structural cost assumptions that fail on a sample of (x, z)."""
    grid = state_grid(GRID_N) if grid is None else grid
    violations = []
    values = np.stack([cost(grid, z) for z in np.linspace(0, 1, n_z)])
    if np.any(np.diff(values, axis=1) <= 0):
        violations.append("increasing_in_x")
    if np.any(values < 0):
        violations.append("nonnegative")
    if getattr(cost, "is_product", False):
        coupling = cost.r2(grid)
        if np.any(coupling <= 0):
            violations.append("positive_coupling")
        if np.any(np.diff(coupling) <= 0):
            violations.append("increasing_coupling")
    else:
        violations.append("product_form")
    return violations


@dataclass
class ModelParams:
    rho: float
    gamma: float
    T: int
    m0: float
    cost: object
    grid_n: int = GRID_N
    xi_grid_n: int = XI_GRID_N

    def __post_init__(self):
        if not 0 < self.rho < 1:
            raise ModelValidationError(f"rho must lie in (0, 1), got {self.rho}")
        if self.gamma < 0:
            raise ModelValidationError(f"gamma must be nonnegative, got {self.gamma}")
        if int(self.T) != self.T or self.T < 0:
            raise ModelValidationError(f"T must be a nonnegative integer, got {self.T}")
        self.T = int(self.T)
        if not 0 <= self.m0 <= 1:
            raise ModelValidationError(f"m0 must lie in [0, 1], got {self.m0}")
        for name in ("grid_n", "xi_grid_n"):
            if getattr(self, name) < 3:
                raise ModelValidationError(
                    f"{name} must be at least 3, got {getattr(self, name)}"
                )

    @property
    def grid(self):
        return state_grid(self.grid_n)

    def operator(self, xi):
        return get_operator(xi, self.grid_n, self.xi_grid_n)

    def running_cost(self, z):
        return self.cost(self.grid, z)
