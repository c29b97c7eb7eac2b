import warnings

import pandas as pd
from tqdm import tqdm

from config import DEFAULT_CONFIG, ORACLE_MIN_TOL
from finite_horizon.mean_field import solve_fixed_point
from stationary.equilibrium import z_of_theta
from utils import (
    ConvergenceWarning,
    TimeoutError,
    combined_se,
    load_experiment,
    print_table,
    save_csv,
    set_timeout,
)
from .nplayer import epsilon_nash_gap
from .regen_oracle import long_run_mean_by_path, regen_estimate

DEFAULT_N_LIST = (50, 200, 800)
ORACLE_THETAS = (0.2, 0.5, 0.8)


def cmd_nplayer(config=DEFAULT_CONFIG, out=None, threads=None, seed=None, n_list=None):
    experiment = load_experiment(config, out, threads, seed)
    if experiment is None:
        return 1
    warnings.filterwarnings("ignore", category=ConvergenceWarning)
    params, xi, solver = experiment.params, experiment.xi, experiment.solver
    n_list = DEFAULT_N_LIST if n_list is None else tuple(n_list)

    solve = set_timeout(solve_fixed_point, solver["max_runtime"])
    try:
        solution = solve(
            experiment.mu0,
            params,
            xi,
            damping=solver["damping"],
            tol=solver["fixed_point_tol"],
            max_iter=solver["fixed_point_max_iter"],
        )
    except TimeoutError:
        print(f"Fixed point search exceeded allowed time ({solver['max_runtime']}s)")
        return 2
    if not solution.converged:
        print(f"Mean field equilibrium not reached (residual {solution.residual:.3g})")
        return 2

    runs, summary = [], []
    for N in tqdm(n_list):
        run = epsilon_nash_gap(
            N,
            solution,
            experiment.mu0,
            xi,
            params,
            seed=experiment.seed,
            replications=experiment.simulation["replications"],
            n_jobs=experiment.threads,
        )
        runs.append(run.replication_frame())
        summary.append(
            {
                "N": N,
                "eps": run.eps_gap,
                "se": run.se,
                "max_deviation": run.max_deviation(solution.z_hat),
            }
        )
    summary = pd.DataFrame(summary)
    save_csv(pd.concat(runs, ignore_index=True), experiment.output_dir, "nplayer_runs.csv")
    save_csv(summary, experiment.output_dir, "nplayer_summary.csv")
    print_table("Empirical epsilon-Nash gaps", summary)
    return 0


def compare_oracles(theta, experiment, operator):
    """Stationary mean at theta from power iteration, cycles and one long path."""
    simulation = experiment.simulation
    z_power = z_of_theta(
        theta, experiment.xi, experiment.solver["power_iteration_tol"], operator=operator
    )
    regen = regen_estimate(
        theta,
        experiment.xi,
        simulation["n_cycles"],
        experiment.seed,
        simulation["n_batches"],
        n_jobs=experiment.threads,
    )
    path = long_run_mean_by_path(
        theta,
        experiment.xi,
        simulation["path_horizon"],
        experiment.seed + 1,
        n_batches=simulation["n_batches"],
    )
    estimates = (z_power, regen.z_est, path.mean)
    max_abs_diff = max(abs(a - b) for a in estimates for b in estimates)
    tolerance = max(3 * combined_se(regen.se_z, path.se), ORACLE_MIN_TOL)
    row = {
        "theta": theta,
        "z_power": z_power,
        "z_regen": regen.z_est,
        "se_regen": regen.se_z,
        "z_path_avg": path.mean,
        "se_path": path.se,
        "max_abs_diff": max_abs_diff,
        "tolerance": tolerance,
    }
    return row, regen


def cmd_oracle_compare(config=DEFAULT_CONFIG, out=None, threads=None, seed=None, thetas=None):
    experiment = load_experiment(config, out, threads, seed)
    if experiment is None:
        return 1
    warnings.filterwarnings("ignore", category=ConvergenceWarning)
    thetas = ORACLE_THETAS if thetas is None else tuple(thetas)
    operator = experiment.params.operator(experiment.xi)

    rows, regen_rows = [], []
    for theta in tqdm(thetas):
        row, regen = compare_oracles(theta, experiment, operator)
        rows.append(row)
        regen_rows.append(regen.to_dict())
    comparison = pd.DataFrame(rows)
    regen_table = pd.DataFrame(regen_rows)[
        ["theta", "n_cycles", "mean_tau", "mean_s", "z_est", "se_z"]
    ]
    save_csv(comparison, experiment.output_dir, "oracle_compare.csv")
    save_csv(regen_table, experiment.output_dir, "regen.csv")
    print_table("Stationary mean by three methods", comparison)

    disagreements = comparison[comparison["max_abs_diff"] > comparison["tolerance"]]
    if len(disagreements):
        print(f"Oracles disagree at theta={disagreements['theta'].tolist()}")
        return 3
    return 0
