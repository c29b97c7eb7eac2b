import warnings
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.optimize import bisect

from config import (
    EQUILIBRIUM_TOL,
    GRID_N,
    POWER_ITERATION_MAX_ITER,
    POWER_ITERATION_TOL,
    TIE_TOL,
    UNIQUENESS_N_SCAN,
    VALUE_ITERATION_MAX_ITER,
    VALUE_ITERATION_TOL,
)
from utils import (
    ConvergenceWarning,
    GridMeasure,
    NoSignChangeError,
    ThresholdDescriptor,
    UniquenessViolation,
    classify_threshold,
    cost_assumption_violations,
    get_operator,
    tv_distance,
)
from utils.policy import ALWAYS_A0, ALWAYS_A1, BOUNDARY, INTERIOR


@dataclass
class StationarySolution:
    z_hat: float
    theta_hat: ThresholdDescriptor
    pi_hat: GridMeasure
    V: np.ndarray
    residual: float
    evaluations: int = 0

    def to_frame(self):
        return pd.DataFrame(
            {
                "z_hat": [self.z_hat],
                "theta_kind": [self.theta_hat.kind],
                "theta_value": [self.theta_hat.theta],
                "pi_atom0": [self.pi_hat.atom0],
                "residual": [self.residual],
            }
        )

    def value_frame(self):
        return pd.DataFrame({"x": self.pi_hat.grid, "V": self.V})


def bellman_operator(g, running, rho, gamma, operator):
    return running + np.minimum(rho * operator.expectation(g), rho * g[0] + gamma)


def value_iteration(
    running,
    rho,
    gamma,
    operator,
    tol=VALUE_ITERATION_TOL,
    max_iter=VALUE_ITERATION_MAX_ITER,
    v_init=None,
):
    """Iterate the contraction from v_init (zero by default) until the sup-norm
    step falls below tol * (1 - rho)."""
    v = np.zeros(operator.n) if v_init is None else np.array(v_init, dtype=float)
    for iteration in range(1, max_iter + 1):
        v_next = bellman_operator(v, running, rho, gamma, operator)
        change = np.max(np.abs(v_next - v))
        v = v_next
        if change <= tol * (1 - rho):
            return v, iteration
    warnings.warn(
        f"Value iteration stopped after {max_iter} iterations (last step {change:.3g})",
        ConvergenceWarning,
    )
    return v, max_iter


def solve_stationary_value(
    z, params, xi, tol=VALUE_ITERATION_TOL, operator=None, v_init=None
):
    if not 0 <= z <= 1:
        raise ValueError(f"z must lie in [0, 1], got {z}")
    operator = params.operator(xi) if operator is None else operator
    v, _ = value_iteration(
        params.running_cost(z), params.rho, params.gamma, operator, tol, v_init=v_init
    )
    return v


def classify_value(v, rho, gamma, operator):
    return classify_threshold(rho * operator.expectation(v), rho * v[0] + gamma, operator.grid)


def threshold_of_z(z, params, xi, tol=VALUE_ITERATION_TOL, operator=None, V=None):
    operator = params.operator(xi) if operator is None else operator
    if V is None:
        V = solve_stationary_value(z, params, xi, tol, operator)
    return classify_value(V, params.rho, params.gamma, operator)


def stationary_value_bounds(z, params):
    """Prior lower and upper bounds on the stationary value function at z."""
    running = params.running_cost(z)
    rho = params.rho
    lower = running + rho * running[0] / (1 - rho)
    upper = np.minimum(
        running[-1] / (1 - rho), running + (params.gamma + rho * running[0]) / (1 - rho)
    )
    return lower, upper


def as_descriptor(theta):
    if isinstance(theta, ThresholdDescriptor):
        return theta
    if theta <= 0:
        return ThresholdDescriptor.always_a1()
    if theta >= 1:
        return ThresholdDescriptor.boundary()
    return ThresholdDescriptor.interior(theta)


def power_iteration(
    theta, xi, operator, tol=POWER_ITERATION_TOL, max_iter=POWER_ITERATION_MAX_ITER
):
    """Iterate the lazy chain mu <- (mu + push(mu)) / 2 from the unit atom at 0
    until one push moves the law by at most tol in total variation.
    Returns (measure, iterations, converged).

    The lazy chain has the same stationary law as the push but no period, so
    small thresholds, where players alternate between 0 and a reset, settle.
    """
    mu = GridMeasure.unit_atom(operator.n)
    for iteration in range(1, max_iter + 1):
        pushed = theta.push(mu, xi, operator)
        if tv_distance(pushed, mu) <= tol:
            return pushed, iteration, True
        mu = GridMeasure(
            0.5 * (mu.atom0 + pushed.atom0), 0.5 * (mu.density + pushed.density)
        )
    return mu, max_iter, False


def stationary_distribution(
    theta,
    xi,
    tol=POWER_ITERATION_TOL,
    grid_n=GRID_N,
    operator=None,
    max_iter=POWER_ITERATION_MAX_ITER,
):
    theta = as_descriptor(theta)
    operator = get_operator(xi, grid_n) if operator is None else operator
    if theta.kind == ALWAYS_A1:
        return GridMeasure.unit_atom(operator.n)
    if theta.kind in (BOUNDARY, ALWAYS_A0):
        return GridMeasure.atom_at_one(operator.n)
    mu, iterations, converged = power_iteration(theta, xi, operator, tol, max_iter)
    if not converged:
        warnings.warn(
            f"Stationary law for theta={theta.theta:.6g} not settled "
            f"after {iterations} pushes",
            ConvergenceWarning,
        )
    return mu


def z_of_theta(theta, xi, tol=POWER_ITERATION_TOL, grid_n=GRID_N, operator=None):
    return stationary_distribution(theta, xi, tol, grid_n, operator).mean()


class EquilibriumMap:
    """h(z) = z(theta(z)) - z, warm-starting value iteration between calls."""

    def __init__(
        self,
        params,
        xi,
        vi_tol=VALUE_ITERATION_TOL,
        pi_tol=POWER_ITERATION_TOL,
        operator=None,
    ):
        self.params = params
        self.xi = xi
        self.vi_tol = vi_tol
        self.pi_tol = pi_tol
        self.operator = params.operator(xi) if operator is None else operator
        self.v_warm = None
        self.evaluations = 0

    def solve(self, z):
        V = solve_stationary_value(
            z, self.params, self.xi, self.vi_tol, self.operator, self.v_warm
        )
        self.v_warm = V
        self.evaluations += 1
        theta = classify_value(V, self.params.rho, self.params.gamma, self.operator)
        pi = stationary_distribution(theta, self.xi, self.pi_tol, operator=self.operator)
        return V, theta, pi

    def __call__(self, z):
        return self.solve(z)[2].mean() - z


def bisect_root(h, a, b, tol, zero_tol=TIE_TOL):
    h_a, h_b = h(a), h(b)
    if abs(h_a) <= zero_tol:
        return a
    if abs(h_b) <= zero_tol:
        return b
    if h_a < 0 or h_b > 0:
        raise NoSignChangeError(
            f"h does not change sign on [{a}, {b}]: h({a})={h_a:.6g}, h({b})={h_b:.6g}"
        )
    return bisect(h, a, b, xtol=tol)


def scan_root(h, a, b, n_scan, tol):
    zs = np.linspace(a, b, n_scan)
    hs = np.array([h(z) for z in zs])
    for i in range(n_scan):
        if abs(hs[i]) <= tol:
            return zs[i]
        if i + 1 < n_scan and hs[i] * hs[i + 1] < 0:
            return bisect(h, zs[i], zs[i + 1], xtol=tol)
    raise NoSignChangeError(
        f"No sign change of h on a {n_scan}-point scan of [{a}, {b}] "
        f"(min |h| = {np.abs(hs).min():.3g})"
    )


def has_monotone_coupling(params):
    violations = cost_assumption_violations(params.cost, params.grid)
    return "product_form" not in violations and "increasing_coupling" not in violations


def solve_stationary_equilibrium(
    params,
    xi,
    tol=EQUILIBRIUM_TOL,
    bracket=(0.0, 1.0),
    vi_tol=VALUE_ITERATION_TOL,
    pi_tol=POWER_ITERATION_TOL,
    n_scan=UNIQUENESS_N_SCAN,
    operator=None,
):
    """Root of h(z) = z(theta(z)) - z.

    A cost without coupling needs a single evaluation. Product costs with an
    increasing coupling factor make h nonincreasing, so plain bisection on
    `bracket` is used; other costs are scanned first and refined by bisection.
    """
    h = EquilibriumMap(params, xi, vi_tol, pi_tol, operator)
    if not params.cost.depends_on_z:
        V, theta, pi = h.solve(params.m0)
        z_hat = pi.mean()
        return StationarySolution(z_hat, theta, pi, V, 0.0, h.evaluations)

    a, b = bracket
    if has_monotone_coupling(params):
        z_hat = bisect_root(h, a, b, tol)
    else:
        z_hat = scan_root(h, a, b, n_scan, tol)
    V, theta, pi = h.solve(z_hat)
    return StationarySolution(
        float(z_hat), theta, pi, V, abs(pi.mean() - z_hat), h.evaluations
    )


@dataclass
class UniquenessReport:
    z_grid: np.ndarray
    h: np.ndarray
    thresholds: list
    sign_changes: int
    near_roots: list
    assumption_violations: list = field(default_factory=list)

    def to_frame(self):
        return pd.DataFrame(
            {
                "z": self.z_grid,
                "theta_kind": [d.kind for d in self.thresholds],
                "theta_value": [d.theta for d in self.thresholds],
                "h": self.h,
            }
        )


def count_sign_changes(values, zero_tol):
    signs = np.where(np.abs(values) <= zero_tol, 0, np.sign(values))
    signs = signs[signs != 0]
    return int(np.sum(signs[1:] != signs[:-1]))


def uniqueness_probe(params, xi, n_scan=UNIQUENESS_N_SCAN, zero_tol=1e-9, operator=None):
    """Scan h on [0, 1] and count its sign changes.

    More than one change under a product cost with increasing coupling is an
    error; otherwise the failed assumptions are listed in the report.
    """
    h = EquilibriumMap(params, xi, operator=operator)
    z_grid = np.linspace(0, 1, n_scan)
    values, thresholds = np.empty(n_scan), []
    for i, z in enumerate(z_grid):
        _, theta, pi = h.solve(z)
        values[i] = pi.mean() - z
        thresholds.append(theta)

    near_roots = [float(z) for z, v in zip(z_grid, values) if abs(v) <= zero_tol]
    for i in range(n_scan - 1):
        if values[i] * values[i + 1] < 0 and min(abs(values[i]), abs(values[i + 1])) > zero_tol:
            weight = values[i] / (values[i] - values[i + 1])
            near_roots.append(float(z_grid[i] + weight * (z_grid[i + 1] - z_grid[i])))

    report = UniquenessReport(
        z_grid,
        values,
        thresholds,
        count_sign_changes(values, zero_tol),
        sorted(near_roots),
        cost_assumption_violations(params.cost, params.grid),
    )
    if report.sign_changes > 1 and not report.assumption_violations:
        raise UniquenessViolation(
            f"h changes sign {report.sign_changes} times near {report.near_roots}"
        )
    return report


def threshold_scenario_holds(theta1, theta2, tol=TIE_TOL):
    """Allowed (theta(z1), theta(z2)) pairs for z2 < z1 under increasing coupling."""
    if theta1.kind == ALWAYS_A1:
        return True
    if theta1.kind == INTERIOR:
        if theta2.kind == INTERIOR:
            return theta2.theta > theta1.theta - tol
        return theta2.kind in (BOUNDARY, ALWAYS_A0)
    return theta2.kind == ALWAYS_A0
