import itertools

import numpy as np
import pytest

from finite_horizon.dp import backstep, evaluate_policy_cost, g_function, solve_dp
from utils import GridMeasure, PolicySchedule, ThresholdDescriptor, TransitionOperator


def brute_force_values(z, params, xi):
    """Optimal values by enumerating every node-wise Markov policy."""
    operator = params.operator(xi)
    K, n, T = operator.matrix, operator.n, params.T
    best = np.full((T + 1, n), np.inf)
    for actions in itertools.product((False, True), repeat=n * T):
        resets = np.reshape(actions, (T, n))
        v = params.running_cost(z[T])
        values = [v]
        for t in reversed(range(T)):
            reset_value = params.rho * v[0] + params.gamma
            v = params.running_cost(z[t]) + np.where(
                resets[t], reset_value, params.rho * K @ v
            )
            values.append(v)
        best = np.minimum(best, values[::-1])
    return best


def test_g_function(uniform_xi):
    operator = TransitionOperator(uniform_xi, 201, 201)
    grid = operator.grid
    assert np.allclose(g_function(np.ones(201), uniform_xi, operator), 1.0)
    assert np.allclose(g_function(grid, uniform_xi, operator), grid + (1 - grid) / 2)
    assert np.all(np.diff(g_function(grid ** 3 + grid, uniform_xi, operator)) > 0)


def test_backstep_with_prohibitive_reset_cost(make_params, uniform_xi):
    params = make_params(gamma=100.0)
    v, descriptor = backstep(params.running_cost(0.5), 0.5, params, uniform_xi)
    assert descriptor == ThresholdDescriptor.always_a0()
    expected = params.running_cost(0.5) + params.rho * g_function(
        params.running_cost(0.5), uniform_xi, params.operator(uniform_xi)
    )
    assert np.allclose(v, expected)


def test_backstep_with_free_reset(make_params, uniform_xi):
    params = make_params(gamma=0.0)
    v, descriptor = backstep(params.running_cost(0.5), 0.5, params, uniform_xi)
    assert descriptor.kind == "always_a1"
    assert np.allclose(v, params.running_cost(0.5))


def test_backstep_tie_goes_to_reset(make_params, uniform_xi):
    params = make_params(gamma=0.0)
    _, descriptor = backstep(np.ones(params.grid_n), 0.5, params, uniform_xi)
    assert descriptor.kind == "always_a1"


def test_solve_dp_interior_threshold(make_params, uniform_xi):
    params = make_params(T=1, gamma=0.6)
    values, schedule = solve_dp([0.0, 0.0], params, uniform_xi)
    # rho * (1 + x) / 2 = gamma at the threshold
    assert schedule[0].kind == "interior"
    assert np.isclose(schedule[0].theta, 2 * 0.6 / 0.9 - 1, atol=1e-8)
    assert schedule[1] == ThresholdDescriptor.always_a0()
    assert np.allclose(values[1], params.running_cost(0.0))


def test_solve_dp_horizon_zero(make_params, uniform_xi):
    params = make_params(T=0)
    values, schedule = solve_dp([0.3], params, uniform_xi)
    assert schedule.T == 0
    assert np.allclose(values[0], params.running_cost(0.3))


def test_solve_dp_checks_path(make_params, uniform_xi):
    params = make_params(T=2)
    with pytest.raises(ValueError):
        solve_dp([0.0, 0.5], params, uniform_xi)
    with pytest.raises(ValueError):
        solve_dp([0.0, 0.5, 1.5], params, uniform_xi)


def test_values_are_monotone_and_satisfy_bellman(make_params, beta_xi):
    params = make_params(T=6)
    z = np.linspace(0, 0.6, 7)
    values, schedule = solve_dp(z, params, beta_xi)
    operator = params.operator(beta_xi)
    assert np.all(np.diff(values.values, axis=1) >= -1e-12)
    for t in range(params.T):
        continuation = params.rho * operator.matrix @ values[t + 1]
        reset_value = params.rho * values[t + 1][0] + params.gamma
        bellman = params.running_cost(z[t]) + np.minimum(continuation, reset_value)
        assert np.max(np.abs(values[t] - bellman)) < 1e-12
    assert all(descriptor.kind in ("interior", "always_a0", "boundary", "always_a1")
               for descriptor in schedule)


def test_thresholds_under_no_coupling_ignore_the_path(make_params, uniform_xi):
    params = make_params(r2=(1.0,))
    first = solve_dp(np.zeros(11), params, uniform_xi)
    second = solve_dp(np.linspace(0, 1, 11), params, uniform_xi)
    assert np.allclose(first[0].values, second[0].values)
    assert list(first[1]) == list(second[1])


@pytest.mark.parametrize("grid_n, T", [(3, 2), (4, 3)])
def test_against_policy_enumeration(make_params, uniform_xi, grid_n, T):
    params = make_params(T=T, gamma=0.3, grid_n=grid_n)
    z = np.linspace(0.0, 0.8, T + 1)
    values, _ = solve_dp(z, params, uniform_xi)
    assert np.max(np.abs(values.values - brute_force_values(z, params, uniform_xi))) < 1e-9


def test_evaluate_policy_cost_without_running_cost(make_params, uniform_xi):
    params = make_params(r1=(0.0,), T=4, gamma=0.5)
    z = np.zeros(5)
    mu0 = GridMeasure.uniform(params.grid_n)
    never = PolicySchedule.constant(ThresholdDescriptor.always_a0(), 4)
    always = PolicySchedule.constant(ThresholdDescriptor.always_a1(), 4)
    assert evaluate_policy_cost(never, z, mu0, params, uniform_xi) == 0.0
    expected = 0.5 * sum(params.rho ** t for t in range(4))
    assert np.isclose(evaluate_policy_cost(always, z, mu0, params, uniform_xi), expected)


def test_evaluate_policy_cost_horizon_zero(make_params, uniform_xi):
    params = make_params(T=0, m0=0.5)
    mu0 = GridMeasure.uniform(params.grid_n)
    schedule = PolicySchedule([])
    cost = evaluate_policy_cost(schedule, [0.5], mu0, params, uniform_xi)
    assert np.isclose(cost, 0.5 * 1.5)


def test_optimal_schedule_beats_constant_schedules(make_params, uniform_xi):
    params = make_params(T=8)
    z = np.linspace(0, 0.5, 9)
    mu0 = GridMeasure.unit_atom(params.grid_n)
    values, schedule = solve_dp(z, params, uniform_xi)
    optimum = values[0][0]
    optimal_cost = evaluate_policy_cost(schedule, z, mu0, params, uniform_xi)
    assert optimal_cost >= optimum - 1e-9
    assert np.isclose(optimal_cost, optimum, atol=1e-3)
    for descriptor in (
        ThresholdDescriptor.always_a0(),
        ThresholdDescriptor.always_a1(),
        ThresholdDescriptor.interior(0.5),
    ):
        constant = PolicySchedule.constant(descriptor, params.T)
        assert evaluate_policy_cost(constant, z, mu0, params, uniform_xi) >= optimum - 1e-9
