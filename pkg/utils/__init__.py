from .errors import (
    ConvergenceWarning,
    ModelValidationError,
    MonotonicityError,
    NoSignChangeError,
    UniquenessViolation,
)
from .kernel import (
    XiSpec,
    UniformXi,
    BetaXi,
    TruncatedExpXi,
    TransitionOperator,
    get_operator,
    q0_expectation,
    q0_next,
    state_grid,
    xi_density,
    xi_quadrature,
    xi_sample,
)
from .measures import (
    GridMeasure,
    mean,
    push_a0,
    push_threshold,
    reset_all,
    tv_distance,
)
from .policy import PolicySchedule, ThresholdDescriptor, classify_threshold
from .costs import (
    GeneralCost,
    ModelParams,
    ProductCost,
    ScalarFunction,
    TableCost,
    cost_assumption_violations,
)
from .experiment_config import ExperimentConfig, initial_measure, load_experiment
from .results import load_json, print_table, save_csv, save_json
from .stats import batch_means, batch_means_se, combined_se, standard_error
from .timeout import set_timeout, TimeoutError
