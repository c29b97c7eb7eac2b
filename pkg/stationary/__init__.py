import warnings

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from tqdm import tqdm

from config import DEFAULT_CONFIG
from utils import (
    ConvergenceWarning,
    ModelValidationError,
    NoSignChangeError,
    TimeoutError,
    UniquenessViolation,
    load_experiment,
    print_table,
    save_csv,
    save_json,
    set_timeout,
)
from .aux_mdp import r_bounds, theta_sweep_over_r
from .equilibrium import (
    has_monotone_coupling,
    solve_stationary_equilibrium,
    uniqueness_probe,
    z_of_theta,
)
from .ergodicity import ergodicity_report

DEFAULT_THETAS = tuple(np.round(np.linspace(0.05, 0.95, 19), 2))
ERGODICITY_THETAS = (0.2, 0.5, 0.8)


def cmd_stationary(config=DEFAULT_CONFIG, out=None, threads=None, seed=None):
    experiment = load_experiment(config, out, threads, seed)
    if experiment is None:
        return 1
    warnings.filterwarnings("ignore", category=ConvergenceWarning)
    params, xi, solver = experiment.params, experiment.xi, experiment.solver

    solve = set_timeout(solve_stationary_equilibrium, solver["max_runtime"])
    try:
        solution = solve(
            params,
            xi,
            tol=solver["equilibrium_tol"],
            vi_tol=solver["value_iteration_tol"],
            pi_tol=solver["power_iteration_tol"],
            n_scan=solver["n_scan"],
        )
    except NoSignChangeError as e:
        print(f"No stationary equilibrium found: {e}")
        return 2
    except TimeoutError:
        print(f"Equilibrium search exceeded allowed time ({solver['max_runtime']}s)")
        return 2

    results_dir = experiment.output_dir
    save_csv(solution.to_frame(), results_dir, "stationary.csv")
    save_csv(solution.value_frame(), results_dir, "stationary_value.csv")
    save_csv(solution.pi_hat.to_frame(), results_dir, "stationary_measure.csv")
    print_table("Stationary equilibrium", solution.to_frame())

    if params.cost.depends_on_z and has_monotone_coupling(params):
        try:
            report = uniqueness_probe(params, xi, solver["n_scan"])
        except UniquenessViolation as e:
            print(f"Uniqueness probe failed: {e}")
            return 2
        save_csv(report.to_frame(), results_dir, "uniqueness_scan.csv")
        print(f"Sign changes of h on {solver['n_scan']} points: {report.sign_changes}")
    return 0


def cmd_theta_sweep(config=DEFAULT_CONFIG, out=None, threads=None, seed=None, thetas=None):
    experiment = load_experiment(config, out, threads, seed)
    if experiment is None:
        return 1
    thetas = DEFAULT_THETAS if thetas is None else tuple(thetas)
    tol = experiment.solver["power_iteration_tol"]
    operator = experiment.params.operator(experiment.xi)

    z_values = Parallel(n_jobs=experiment.threads)(
        delayed(z_of_theta)(theta, experiment.xi, tol, operator=operator)
        for theta in tqdm(thetas)
    )
    sweep = pd.DataFrame({"theta": thetas, "z_of_theta": z_values})
    save_csv(sweep, experiment.output_dir, "theta_sweep.csv")
    print_table("z(theta)", sweep)
    if np.any(np.diff(sweep["z_of_theta"]) < -1e-6):
        print("Warning: z(theta) is not monotone on this sweep")
    return 0


def cmd_r_sweep(config=DEFAULT_CONFIG, out=None, threads=None, seed=None, r_values=None):
    experiment = load_experiment(config, out, threads, seed)
    if experiment is None:
        return 1
    params = experiment.params
    if not params.cost.is_product:
        print("The r sweep needs a product-form cost R1(x) R2(z)")
        return 1
    tol = experiment.solver["value_iteration_tol"]
    operator = params.operator(experiment.xi)

    try:
        bounds = r_bounds(params.cost.r1, experiment.xi, params.rho, tol, operator=operator)
    except ModelValidationError as e:
        print(f"Invalid configuration: {e}")
        return 1
    print(f"r_low={bounds.r_low:.10g}, r_high={bounds.r_high:.10g}, C={bounds.c_r1:.10g}")

    if r_values is None:
        r_values = np.linspace(0.5 * bounds.r_low, 1.5 * bounds.r_high, 41)
    r_values = np.sort(np.asarray(r_values, dtype=float))
    thresholds = theta_sweep_over_r(
        tqdm(r_values), params.cost.r1, experiment.xi, params.rho, tol, operator=operator
    )
    sweep = pd.DataFrame(
        {
            "r": r_values,
            "theta_kind": [d.kind for d in thresholds],
            "theta_value": [d.theta for d in thresholds],
        }
    )
    save_csv(sweep, experiment.output_dir, "r_sweep.csv")
    save_csv(pd.DataFrame([bounds.to_dict()]), experiment.output_dir, "r_bounds.csv")
    save_json(bounds.to_dict(), experiment.output_dir, "r_bounds.json")
    return 0


def cmd_ergodicity(
    config=DEFAULT_CONFIG, out=None, threads=None, seed=None, thetas=None, horizon=None
):
    experiment = load_experiment(config, out, threads, seed)
    if experiment is None:
        return 1
    warnings.filterwarnings("ignore", category=ConvergenceWarning)
    thetas = ERGODICITY_THETAS if thetas is None else tuple(thetas)
    horizon = experiment.simulation["horizon"] if horizon is None else horizon
    operator = experiment.params.operator(experiment.xi)

    series, fits = [], []
    for theta in tqdm(thetas):
        report = ergodicity_report(
            theta,
            experiment.xi,
            horizon,
            tol=experiment.solver["power_iteration_tol"],
            operator=operator,
        )
        frame = report.to_frame()
        frame.insert(0, "theta", theta)
        series.append(frame)
        fits.append(
            {
                "theta": theta,
                "K": report.K,
                "r": report.r,
                "fit_ok": report.fit_ok,
                "steps_below_1e-6": report.steps_below(1e-6),
            }
        )
    fits = pd.DataFrame(fits)
    save_csv(pd.concat(series, ignore_index=True), experiment.output_dir, "ergodicity.csv")
    save_csv(fits, experiment.output_dir, "ergodicity_fit.csv")
    print_table("Geometric convergence fits", fits)
    return 0 if fits["fit_ok"].all() else 2
