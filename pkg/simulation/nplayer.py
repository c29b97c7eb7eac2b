from dataclasses import dataclass

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from config import RANDOM_STATE, REPLICATIONS
from finite_horizon.dp import solve_dp
from utils import standard_error


def play(x0, innovations, schedule):
    """States and reset indicators, shaped (T + 1,) + x0.shape, of players
    following `schedule` from x0 with the given innovations (T,) + x0.shape."""
    x0 = np.asarray(x0, dtype=float)
    T = len(innovations)
    states = np.empty((T + 1,) + x0.shape)
    resets = np.zeros((T + 1,) + x0.shape, dtype=bool)
    states[0] = x0
    for t in range(T):
        resets[t] = schedule[t].acts(states[t])
        states[t + 1] = np.where(
            resets[t], 0.0, states[t] + (1 - states[t]) * innovations[t]
        )
    return states, resets


def discounted_costs(states, resets, means, params):
    """Sum over t of rho^t (R(x_t, m_t) + gamma * reset_t); `means` must
    broadcast against each states[t]."""
    total = np.zeros(states.shape[1:])
    for t in range(len(states)):
        stage = params.cost(states[t], means[t]) + params.gamma * resets[t]
        total += params.rho ** t * stage
    return total


@dataclass
class NPlayerRun:
    N: int
    seed: int
    states: np.ndarray
    resets: np.ndarray
    innovations: np.ndarray
    realized_costs: np.ndarray
    eps_gap: float = None
    se: float = None
    deviation_costs: np.ndarray = None

    @property
    def replications(self):
        return self.states.shape[1]

    @property
    def paths(self):
        """Player states shaped (replications, N, T + 1)."""
        return np.moveaxis(self.states, 0, -1)

    @property
    def empirical_mean(self):
        """Population average shaped (T + 1, replications)."""
        return self.states.mean(axis=2)

    def max_deviation(self, z_hat):
        """Replication average of max_t |empirical mean - z_hat_t|."""
        z = np.asarray(z_hat, dtype=float)[:, None]
        return float(np.max(np.abs(self.empirical_mean - z), axis=0).mean())

    def replication_frame(self):
        frame = pd.DataFrame(
            {
                "N": self.N,
                "replication": np.arange(self.replications),
                "J_equilibrium": self.realized_costs[:, 0],
            }
        )
        if self.deviation_costs is not None:
            frame["J_deviation"] = self.deviation_costs
            frame["gap"] = frame["J_equilibrium"] - frame["J_deviation"]
        return frame


def simulate_game(
    N, schedule, mu0, xi, params, seed=RANDOM_STATE, replications=REPLICATIONS
):
    """All N players follow `schedule`; initial states are i.i.d. from mu0 and
    innovations are independent across players and replications."""
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    random_state = np.random.default_rng(seed)
    x0 = mu0.sample(random_state, (replications, N))
    if params.T:
        innovations = xi.sample(random_state, (params.T, replications, N))
    else:
        innovations = np.empty((0, replications, N))
    states, resets = play(x0, innovations, schedule)
    means = states.mean(axis=2)[:, :, None]
    costs = discounted_costs(states, resets, means, params)
    return NPlayerRun(N, seed, states, resets, innovations, costs)


def _deviation_cost(states, innovations, params, xi):
    """Cost of player 0 best-responding to the realized mean of the others.

    `states` and `innovations` belong to one replication, shaped (T + 1, N) and (T, N).
    """
    N = states.shape[1]
    others = states[:, 1:] if N > 1 else states
    _, deviation = solve_dp(np.clip(others.mean(axis=1), 0, 1), params, xi)
    own_states, own_resets = play(states[0, 0], innovations[:, 0], deviation)
    means = (own_states + states[:, 1:].sum(axis=1)) / N
    return float(discounted_costs(own_states, own_resets, means, params))


def epsilon_nash_gap(
    N,
    solution,
    mu0,
    xi,
    params,
    seed=RANDOM_STATE,
    replications=REPLICATIONS,
    n_jobs=1,
):
    """Mean gain of player 0 from deviating to a best response, with its SE.

    The deviation reuses the replication's initial state and innovations, and
    best-responds to the others' realized mean path, which bounds the gain
    available to Markov deviations from below.
    """
    run = simulate_game(N, solution.schedule, mu0, xi, params, seed, replications)
    deviation_costs = Parallel(n_jobs=n_jobs)(
        delayed(_deviation_cost)(run.states[:, r], run.innovations[:, r], params, xi)
        for r in range(replications)
    )
    run.deviation_costs = np.array(deviation_costs)
    gaps = run.realized_costs[:, 0] - run.deviation_costs
    run.eps_gap = float(gaps.mean())
    run.se = standard_error(gaps)
    return run
