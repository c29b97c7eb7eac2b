import numpy as np
import pandas as pd

from utils import PolicySchedule, classify_threshold, get_operator


class ValueTable:
    """V(t, .) and G_t = E[V(t, x + (1 - x) xi)] on the state grid, t = 0..T."""

    def __init__(self, values, g_values, grid):
        self.values = values
        self.g_values = g_values
        self.grid = grid

    @property
    def T(self):
        return len(self.values) - 1

    def __getitem__(self, t):
        return self.values[t]

    def to_frame(self):
        T, n = self.values.shape
        return pd.DataFrame(
            {
                "t": np.repeat(np.arange(T), n),
                "x": np.tile(self.grid, T),
                "V": self.values.ravel(),
            }
        )


def g_function(v_next, xi, operator=None):
    operator = get_operator(xi, len(v_next)) if operator is None else operator
    return operator.expectation(np.asarray(v_next, dtype=float))


def bellman_step(g_next, v_next_at_zero, running, rho, gamma, grid):
    continuation = rho * g_next
    reset_value = rho * v_next_at_zero + gamma
    v = running + np.minimum(continuation, reset_value)
    return v, classify_threshold(continuation, reset_value, grid)


def backstep(v_next, z_t, params, xi, operator=None):
    operator = params.operator(xi) if operator is None else operator
    return bellman_step(
        operator.expectation(v_next),
        v_next[0],
        params.running_cost(z_t),
        params.rho,
        params.gamma,
        operator.grid,
    )


def check_path(z_path, T):
    z = np.asarray(z_path, dtype=float)
    if z.shape != (T + 1,):
        raise ValueError(f"Mean field path needs {T + 1} entries, got {z.shape}")
    if np.any((z < 0) | (z > 1)):
        raise ValueError("Mean field path values must lie in [0, 1]")
    return z


def solve_dp(z_path, params, xi, operator=None):
    operator = params.operator(xi) if operator is None else operator
    T = params.T
    z = check_path(z_path, T)

    values = np.empty((T + 1, operator.n))
    g_values = np.empty((T + 1, operator.n))
    values[T] = params.running_cost(z[T])
    descriptors = [None] * T
    for t in reversed(range(T)):
        g_values[t + 1] = operator.expectation(values[t + 1])
        values[t], descriptors[t] = bellman_step(
            g_values[t + 1],
            values[t + 1][0],
            params.running_cost(z[t]),
            params.rho,
            params.gamma,
            operator.grid,
        )
    g_values[0] = operator.expectation(values[0])
    return ValueTable(values, g_values, operator.grid), PolicySchedule(descriptors)


def evaluate_policy_cost(schedule, z_path, mu0, params, xi, operator=None):
    """Expected discounted cost of a threshold schedule started from mu0."""
    if schedule.T != params.T:
        raise ValueError(f"Schedule covers T={schedule.T}, model has T={params.T}")
    operator = params.operator(xi) if operator is None else operator
    z = check_path(z_path, params.T)
    mu, total = mu0, 0.0
    for t, descriptor in enumerate(schedule):
        stage = mu.integrate(params.running_cost(z[t]))
        stage += params.gamma * descriptor.reset_mass(mu)
        total += params.rho ** t * stage
        if t < params.T:
            mu = descriptor.push(mu, xi, operator)
    return total
