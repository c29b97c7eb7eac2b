import warnings
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from config import DAMPING, FIXED_POINT_MAX_ITER, FIXED_POINT_TOL, MEAN_TOLERANCE
from utils import ConvergenceWarning, GridMeasure, ModelValidationError
from .dp import solve_dp


class MeanFieldPath:
    """Mean field path z_0..z_T; z_0 is pinned to the initial mean m0."""

    def __init__(self, z, m0=None):
        self.z = np.array(z, dtype=float)
        if m0 is not None and abs(self.z[0] - m0) > 1e-12:
            raise ValueError(f"Path starts at {self.z[0]} instead of m0={m0}")

    @classmethod
    def constant(cls, m0, T):
        return cls(np.full(T + 1, float(m0)))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.z, dtype=dtype)

    def __len__(self):
        return len(self.z)

    def __getitem__(self, t):
        return self.z[t]

    def sup_distance(self, other):
        return float(np.max(np.abs(self.z - np.asarray(other, dtype=float))))


@dataclass
class MeanFieldSolution:
    z_hat: MeanFieldPath
    schedule: object
    mu_path: list
    residual: float
    iterations: int
    converged: bool
    residual_history: list = field(default_factory=list)
    value_table: object = None

    def to_frame(self):
        frame = self.schedule.to_frame()
        frame.insert(1, "z_hat", self.z_hat.z)
        frame["mean_mu"] = [mu.mean() for mu in self.mu_path]
        return frame[["t", "z_hat", "theta_kind", "theta_value", "mean_mu"]]

    def residual_frame(self):
        return pd.DataFrame(
            {
                "iter": np.arange(len(self.residual_history)),
                "residual": self.residual_history,
            }
        )

    def measures_frame(self):
        frames = []
        for t, mu in enumerate(self.mu_path):
            frame = mu.to_frame()
            frame.insert(0, "t", t)
            frames.append(frame)
        return pd.concat(frames, ignore_index=True)


def default_initial_measure(params):
    if params.m0 != 0:
        raise ModelValidationError(
            f"m0={params.m0} needs an explicit initial measure with that mean"
        )
    return GridMeasure.unit_atom(params.grid_n)


def check_initial_measure(mu0, params):
    if mu0.n != params.grid_n:
        raise ModelValidationError(
            f"mu0 lives on {mu0.n} nodes, the model grid has {params.grid_n}"
        )
    if abs(mu0.mean() - params.m0) > MEAN_TOLERANCE:
        raise ModelValidationError(
            f"mu0 has mean {mu0.mean():.8g}, expected m0={params.m0}"
        )
    return mu0


def propagate(mu0, schedule, xi, operator=None):
    mu_path = [mu0]
    for descriptor in schedule.descriptors[:-1]:
        mu_path.append(descriptor.push(mu_path[-1], xi, operator))
    return mu_path


def evaluate_phi(z_path, mu0, params, xi, operator=None):
    """Best response to z_path and the mean path it induces from mu0."""
    operator = params.operator(xi) if operator is None else operator
    value_table, schedule = solve_dp(z_path, params, xi, operator)
    mu_path = propagate(mu0, schedule, xi, operator)
    w = np.array([mu.mean() for mu in mu_path])
    w[0] = params.m0
    return MeanFieldPath(np.clip(w, 0.0, 1.0)), value_table, schedule, mu_path


def phi_map(z_path, mu0, params, xi, operator=None):
    return evaluate_phi(z_path, mu0, params, xi, operator)[0]


def solve_fixed_point(
    mu0,
    params,
    xi,
    damping=DAMPING,
    tol=FIXED_POINT_TOL,
    max_iter=FIXED_POINT_MAX_ITER,
    operator=None,
):
    """Damped Picard iteration z <- (1 - damping) z + damping Phi(z) from z = m0.

    Returns the iterate with the smallest residual ||Phi(z) - z||_inf; a run that
    hits `max_iter` is flagged and warned about, not raised.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if not 0 < damping <= 1:
        raise ValueError(f"damping must lie in (0, 1], got {damping}")
    check_initial_measure(mu0, params)
    operator = params.operator(xi) if operator is None else operator
    if not params.cost.depends_on_z:
        # Phi is constant, one full step lands on the fixed point
        damping = 1.0

    z = MeanFieldPath.constant(params.m0, params.T)
    history, best = [], None
    for iteration in range(max_iter + 1):
        w, value_table, schedule, mu_path = evaluate_phi(z, mu0, params, xi, operator)
        residual = z.sup_distance(w)
        history.append(residual)
        if best is None or residual < best.residual:
            best = MeanFieldSolution(
                z, schedule, mu_path, residual, iteration, False, history, value_table
            )
        if residual <= tol:
            break
        if iteration < max_iter:
            z = MeanFieldPath((1 - damping) * z.z + damping * w.z, params.m0)

    best.converged = best.residual <= tol
    if not best.converged:
        warnings.warn(
            f"Fixed point iteration stopped after {max_iter} iterations "
            f"with residual {best.residual:.3g} > {tol:g}",
            ConvergenceWarning,
        )
    return best
