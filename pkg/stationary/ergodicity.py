import warnings
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.stats import linregress

from config import ERGODICITY_HORIZON, GRID_N, POWER_ITERATION_TOL
from utils import ConvergenceWarning, GridMeasure, get_operator, tv_distance
from utils.policy import INTERIOR
from .equilibrium import as_descriptor, stationary_distribution


@dataclass
class ErgodicityReport:
    theta: object
    initials: tuple
    tv_series: np.ndarray
    K: float
    r: float
    fit_ok: bool

    @property
    def horizon(self):
        return self.tv_series.shape[1] - 1

    def sup_tv(self):
        return self.tv_series.max(axis=0)

    def steps_below(self, level):
        """First t at which every initial state is within `level` of the stationary law."""
        below = np.nonzero(self.sup_tv() < level)[0]
        return int(below[0]) if len(below) else None

    def to_frame(self):
        steps = np.arange(self.horizon + 1)
        return pd.DataFrame(
            {
                "t": np.tile(steps, len(self.initials)),
                "initial_x": np.repeat(self.initials, len(steps)),
                "tv": self.tv_series.ravel(),
            }
        )


def fit_geometric_rate(tv, burn_in=5, floor=1e-10):
    """Least squares fit of log tv = log K + t log r over the post burn-in points
    above `floor`. Returns (K, r, fit_ok)."""
    steps = np.arange(len(tv))
    mask = (steps >= burn_in) & (tv > floor)
    if mask.sum() < 3:
        return float("nan"), float("nan"), False
    fit = linregress(steps[mask], np.log(tv[mask]))
    K, r = float(np.exp(fit.intercept)), float(np.exp(fit.slope))
    return K, r, r < 1


def ergodicity_report(
    theta,
    xi,
    horizon=ERGODICITY_HORIZON,
    initials=(0.0, 0.5, 1.0),
    grid_n=GRID_N,
    tol=POWER_ITERATION_TOL,
    burn_in=5,
    floor=1e-10,
    operator=None,
):
    theta = as_descriptor(theta)
    if theta.kind != INTERIOR:
        raise ValueError(f"Ergodicity report needs an interior threshold, got {theta}")
    operator = get_operator(xi, grid_n) if operator is None else operator
    pi = stationary_distribution(theta, xi, tol, operator=operator)

    tv_series = np.empty((len(initials), horizon + 1))
    for i, x in enumerate(initials):
        mu = GridMeasure.point_mass(x, operator.n)
        for t in range(horizon + 1):
            tv_series[i, t] = tv_distance(mu, pi)
            if t < horizon:
                mu = theta.push(mu, xi, operator)

    K, r, fit_ok = fit_geometric_rate(tv_series.max(axis=0), burn_in, floor)
    if not fit_ok:
        warnings.warn(
            f"Degenerate geometric fit for theta={theta.theta:.6g} (r={r:.3g})",
            ConvergenceWarning,
        )
    return ErgodicityReport(theta, tuple(initials), tv_series, K, r, fit_ok)
