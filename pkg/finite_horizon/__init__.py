import warnings

from config import DEFAULT_CONFIG
from utils import ConvergenceWarning, TimeoutError, load_experiment, save_csv, set_timeout
from .mean_field import solve_fixed_point


def cmd_finite(config=DEFAULT_CONFIG, out=None, threads=None, seed=None):
    experiment = load_experiment(config, out, threads, seed)
    if experiment is None:
        return 1
    warnings.filterwarnings("ignore", category=ConvergenceWarning)

    solver = experiment.solver
    solve = set_timeout(solve_fixed_point, solver["max_runtime"])
    try:
        solution = solve(
            experiment.mu0,
            experiment.params,
            experiment.xi,
            damping=solver["damping"],
            tol=solver["fixed_point_tol"],
            max_iter=solver["fixed_point_max_iter"],
        )
    except TimeoutError:
        print(f"Fixed point search exceeded allowed time ({solver['max_runtime']}s)")
        return 2

    results_dir = experiment.output_dir
    save_csv(solution.to_frame(), results_dir, "z_path.csv")
    save_csv(solution.schedule.to_frame(), results_dir, "policy.csv")
    save_csv(solution.residual_frame(), results_dir, "residuals.csv")
    save_csv(solution.value_table.to_frame(), results_dir, "value_table.csv")
    save_csv(solution.measures_frame(), results_dir, "measures.csv")

    print(f"Iterations: {solution.iterations}")
    print(f"Residual: {solution.residual:.3g}")
    violations = solution.schedule.positive_threshold_violations(
        solver["min_threshold"]
    )
    if violations:
        print(f"Thresholds not uniformly positive at t={violations}")
    if not solution.converged:
        print(
            f"No fixed point within {solver['fixed_point_max_iter']} iterations "
            f"(tolerance {solver['fixed_point_tol']:g})"
        )
        return 2
    return 0
