import numpy as np
import pytest
from scipy.optimize import brentq

from finite_horizon.mean_field import (
    MeanFieldPath,
    phi_map,
    propagate,
    solve_fixed_point,
)
from utils import (
    ConvergenceWarning,
    GridMeasure,
    ModelValidationError,
    PolicySchedule,
    ThresholdDescriptor,
)


def test_mean_under_never_reset(uniform_xi, make_params):
    params = make_params(T=6)
    schedule = PolicySchedule.constant(ThresholdDescriptor.always_a0(), 6)
    mu_path = propagate(GridMeasure.unit_atom(201), schedule, uniform_xi, params.operator(uniform_xi))
    means = [mu.mean() for mu in mu_path]
    assert np.allclose(means, 1 - 0.5 ** np.arange(7), atol=1e-12)


def test_mean_under_never_reset_by_simulation(uniform_xi, make_params):
    params = make_params(T=3)
    schedule = PolicySchedule.constant(ThresholdDescriptor.always_a0(), 3)
    mu_path = propagate(GridMeasure.unit_atom(201), schedule, uniform_xi, params.operator(uniform_xi))

    random_state = np.random.default_rng(0)
    x = np.zeros(10 ** 5)
    for _ in range(3):
        x = x + (1 - x) * uniform_xi.sample(random_state, len(x))
    se = x.std(ddof=1) / np.sqrt(len(x))
    assert abs(x.mean() - mu_path[3].mean()) < 3 * se


def test_mean_under_always_reset(uniform_xi, make_params):
    params = make_params(T=4)
    schedule = PolicySchedule.constant(ThresholdDescriptor.always_a1(), 4)
    mu_path = propagate(GridMeasure.uniform(201), schedule, uniform_xi, params.operator(uniform_xi))
    assert np.isclose(mu_path[0].mean(), 0.5)
    assert all(mu.mean() == 0.0 for mu in mu_path[1:])


def test_phi_without_coupling_ignores_the_path(uniform_xi, make_params):
    params = make_params(r2=(1.0,))
    mu0 = GridMeasure.unit_atom(201)
    first = phi_map(np.zeros(11), mu0, params, uniform_xi)
    second = phi_map(np.linspace(0, 1, 11), mu0, params, uniform_xi)
    assert first.sup_distance(second) == 0.0
    assert first[0] == 0.0


def test_fixed_point_without_coupling(uniform_xi, make_params):
    params = make_params(r2=(1.0,))
    solution = solve_fixed_point(GridMeasure.unit_atom(201), params, uniform_xi)
    assert solution.converged
    assert solution.iterations == 1
    assert solution.residual <= 1e-12


def test_fixed_point_with_prohibitive_reset_cost(uniform_xi, make_params):
    params = make_params(gamma=100.0, T=5)
    solution = solve_fixed_point(GridMeasure.unit_atom(201), params, uniform_xi)
    assert solution.converged
    assert np.allclose(solution.z_hat.z, 1 - 0.5 ** np.arange(6), atol=1e-6)
    assert all(d.kind == "always_a0" for d in solution.schedule)


def test_one_period_fixed_point(uniform_xi, make_params):
    rho, gamma = 0.9, 0.6
    params = make_params(T=1, m0=0.5, gamma=gamma, grid_n=401, xi_grid_n=401)

    def excess(z1):
        # Uniform mass below theta moves to (1 + x) / 2 on average
        theta = np.clip(2 * gamma / (rho * (1 + z1)) - 1, 0, 1)
        return theta / 2 + theta ** 2 / 4 - z1

    expected = brentq(excess, 0.0, 0.5)
    solution = solve_fixed_point(GridMeasure.uniform(401), params, uniform_xi)
    assert solution.converged
    assert solution.z_hat[0] == 0.5
    assert np.isclose(solution.z_hat[1], expected, atol=1e-4)


def test_labmate_fixed_point(uniform_xi, make_params):
    params = make_params(grid_n=401, xi_grid_n=401)
    mu0 = GridMeasure.unit_atom(401)
    solution = solve_fixed_point(mu0, params, uniform_xi, damping=0.5, tol=1e-6, max_iter=200)
    assert solution.converged
    assert solution.residual <= 1e-6
    assert solution.iterations <= 200
    assert solution.z_hat[0] == 0.0
    assert np.all((solution.z_hat.z >= 0) & (solution.z_hat.z <= 1))

    # The reported residual is reproducible from the reported path
    certificate = solution.z_hat.sup_distance(phi_map(solution.z_hat, mu0, params, uniform_xi))
    assert np.isclose(certificate, solution.residual, atol=1e-12)

    frame = solution.to_frame()
    assert list(frame.columns) == ["t", "z_hat", "theta_kind", "theta_value", "mean_mu"]
    assert len(frame) == params.T + 1
    assert len(solution.residual_frame()) == len(solution.residual_history)


def test_phi_is_continuous_at_the_fixed_point(uniform_xi, make_params):
    params = make_params(grid_n=401, xi_grid_n=401)
    mu0 = GridMeasure.unit_atom(401)
    solution = solve_fixed_point(mu0, params, uniform_xi)
    base = phi_map(solution.z_hat, mu0, params, uniform_xi)
    responses = []
    for delta in (1e-2, 1e-3, 1e-4):
        shifted = solution.z_hat.z.copy()
        shifted[1:] = np.clip(shifted[1:] + delta, 0, 1)
        responses.append(base.sup_distance(phi_map(shifted, mu0, params, uniform_xi)))
    assert responses[2] <= responses[0]
    assert responses[2] < 1e-2


def test_grid_refinement(uniform_xi, make_params):
    coarse = make_params(grid_n=1001, xi_grid_n=1001)
    fine = make_params(grid_n=2001, xi_grid_n=2001)
    z_coarse = solve_fixed_point(GridMeasure.unit_atom(1001), coarse, uniform_xi).z_hat
    z_fine = solve_fixed_point(GridMeasure.unit_atom(2001), fine, uniform_xi).z_hat
    assert z_coarse.sup_distance(z_fine) <= 1e-3


def test_iteration_cap_is_reported(uniform_xi, make_params):
    params = make_params()
    with pytest.warns(ConvergenceWarning):
        solution = solve_fixed_point(
            GridMeasure.unit_atom(201), params, uniform_xi, tol=1e-15, max_iter=1
        )
    assert not solution.converged
    assert len(solution.residual_history) == 2
    assert solution.residual == min(solution.residual_history)


def test_horizon_zero(uniform_xi, make_params):
    params = make_params(T=0)
    solution = solve_fixed_point(GridMeasure.unit_atom(201), params, uniform_xi)
    assert solution.converged
    assert solution.iterations == 0
    assert list(solution.z_hat.z) == [0.0]


def test_initial_measure_must_match_m0(uniform_xi, make_params):
    with pytest.raises(ModelValidationError):
        solve_fixed_point(GridMeasure.uniform(201), make_params(m0=0.0), uniform_xi)
    with pytest.raises(ModelValidationError):
        solve_fixed_point(GridMeasure.unit_atom(101), make_params(), uniform_xi)


def test_path_must_start_at_m0():
    with pytest.raises(ValueError):
        MeanFieldPath([0.1, 0.2], m0=0.0)
    assert len(MeanFieldPath.constant(0.2, 3)) == 4
