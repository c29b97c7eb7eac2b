from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import bisect

from config import EQUILIBRIUM_TOL, GRID_N, VALUE_ITERATION_TOL
from utils import ModelValidationError, get_operator
from .equilibrium import classify_value, value_iteration


@dataclass
class RBounds:
    r_low: float
    r_high: float
    c_r1: float

    def to_dict(self):
        return asdict(self)


class ReducedProblem:
    """Stationary problem with cost R1(x) + r * 1{reset}, solved for varying r.

    The last value function is kept to warm-start the next solve.
    """

    def __init__(self, r1, xi, rho, tol=VALUE_ITERATION_TOL, grid_n=GRID_N, operator=None):
        self.r1 = r1
        self.xi = xi
        self.rho = rho
        self.tol = tol
        self.operator = get_operator(xi, grid_n) if operator is None else operator
        self.running = np.asarray(r1(self.operator.grid), dtype=float)
        self.v_warm = None

    def value(self, r, warm_start=True):
        v_init = self.v_warm if warm_start else None
        v, _ = value_iteration(self.running, self.rho, r, self.operator, self.tol, v_init=v_init)
        self.v_warm = v
        return v

    def theta(self, r, warm_start=True):
        return classify_value(self.value(r, warm_start), self.rho, r, self.operator)

    def probe_residual(self, r, probe):
        """rho * E[v_r(next) | x_probe] - rho * v_r(0) - r; zero where reset at
        x_probe becomes indifferent."""
        v = self.value(r)
        return self.rho * self.operator.expectation(v)[probe] - self.rho * v[0] - r

    def c_r1(self):
        return float(self.operator.expectation(self.running)[0] - self.running[0])


def theta_of_r(r, r1, xi, rho, tol=VALUE_ITERATION_TOL, grid_n=GRID_N, operator=None):
    if r <= 0:
        raise ValueError(f"r must be positive, got {r}")
    return ReducedProblem(r1, xi, rho, tol, grid_n, operator).theta(r, warm_start=False)


def theta_sweep_over_r(r_values, r1, xi, rho, tol=VALUE_ITERATION_TOL, grid_n=GRID_N, operator=None):
    """Thresholds along increasing r, each solve warm-started from the previous one."""
    problem = ReducedProblem(r1, xi, rho, tol, grid_n, operator)
    return [problem.theta(r) for r in r_values]


def r_bounds(r1, xi, rho, tol=VALUE_ITERATION_TOL, grid_n=GRID_N, operator=None, xtol=EQUILIBRIUM_TOL):
    """Largest r with theta(r) = 0 and smallest r with theta(r) = 1+, by bisection."""
    problem = ReducedProblem(r1, xi, rho, tol, grid_n, operator)
    c_r1 = problem.c_r1()
    if c_r1 <= 0:
        raise ModelValidationError(
            f"R1 must be strictly increasing (expected one-step increase {c_r1:.3g})"
        )
    low = rho * (1 - rho) * c_r1 / 2
    high = 2 * rho * problem.running[-1] / (1 - rho) + 1

    bounds = []
    for probe in (0, -1):
        f_low, f_high = problem.probe_residual(low, probe), problem.probe_residual(high, probe)
        if not f_low > 0 > f_high:
            raise ModelValidationError(
                f"Reset indifference not bracketed on [{low:.6g}, {high:.6g}] "
                f"(residuals {f_low:.3g}, {f_high:.3g}); is R1 strictly increasing?"
            )
        bounds.append(bisect(problem.probe_residual, low, high, args=(probe,), xtol=xtol))
    return RBounds(bounds[0], bounds[1], c_r1)
