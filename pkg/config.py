RESULTS_DIR = "results"
DEFAULT_CONFIG = "configs/labmate.json"
CONFIG_SCHEMA_VERSION = 1
RANDOM_STATE = 42

GRID_N = 2001
XI_GRID_N = 2001

BISECTION_XTOL = 1e-10
TIE_TOL = 1e-12
MASS_TOLERANCE = 1e-8
MEAN_TOLERANCE = 1e-6

VALUE_ITERATION_TOL = 1e-10
VALUE_ITERATION_MAX_ITER = 10000
POWER_ITERATION_TOL = 1e-12
POWER_ITERATION_MAX_ITER = 5000

FIXED_POINT_TOL = 1e-6
FIXED_POINT_MAX_ITER = 200
DAMPING = 0.5

EQUILIBRIUM_TOL = 1e-10
UNIQUENESS_N_SCAN = 101
MIN_THRESHOLD = 1e-6

N_CYCLES = 100000
N_BATCHES = 100
PATH_HORIZON = 1000000
CYCLE_STEP_CAP = 10 ** 7
ERGODICITY_HORIZON = 200
REPLICATIONS = 200
ORACLE_MIN_TOL = 1e-3

SOLVER_DEFAULTS = {
    "bisection_xtol": BISECTION_XTOL,
    "tie_tol": TIE_TOL,
    "value_iteration_tol": VALUE_ITERATION_TOL,
    "value_iteration_max_iter": VALUE_ITERATION_MAX_ITER,
    "power_iteration_tol": POWER_ITERATION_TOL,
    "power_iteration_max_iter": POWER_ITERATION_MAX_ITER,
    "fixed_point_tol": FIXED_POINT_TOL,
    "fixed_point_max_iter": FIXED_POINT_MAX_ITER,
    "damping": DAMPING,
    "equilibrium_tol": EQUILIBRIUM_TOL,
    "n_scan": UNIQUENESS_N_SCAN,
    "min_threshold": MIN_THRESHOLD,
    "max_runtime": 0,
}

SIMULATION_DEFAULTS = {
    "n_cycles": N_CYCLES,
    "n_batches": N_BATCHES,
    "path_horizon": PATH_HORIZON,
    "replications": REPLICATIONS,
    "horizon": ERGODICITY_HORIZON,
}
