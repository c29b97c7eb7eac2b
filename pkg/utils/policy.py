from dataclasses import dataclass
from functools import total_ordering

import numpy as np
import pandas as pd
from scipy.optimize import bisect

from config import BISECTION_XTOL, TIE_TOL
from .errors import MonotonicityError
from .measures import push_a0, push_threshold, reset_all, threshold_split

ALWAYS_A1 = "always_a1"
INTERIOR = "interior"
BOUNDARY = "boundary"
ALWAYS_A0 = "always_a0"
KINDS = (ALWAYS_A1, INTERIOR, BOUNDARY, ALWAYS_A0)


@total_ordering
@dataclass(frozen=True)
class ThresholdDescriptor:
    """Threshold policy: reset (a1) exactly when the state is at or above theta.

    `always_a0` is the formal threshold 1+ (never reset). It sorts above the
    boundary threshold 1 although both carry theta = 1.
    """

    kind: str
    theta: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"Unknown threshold kind '{self.kind}'")
        if self.kind == INTERIOR and not 0 < self.theta < 1:
            raise ValueError(f"Interior threshold must lie in (0, 1), got {self.theta}")

    @classmethod
    def always_a1(cls):
        return cls(ALWAYS_A1, 0.0)

    @classmethod
    def interior(cls, theta):
        return cls(INTERIOR, float(theta))

    @classmethod
    def boundary(cls):
        return cls(BOUNDARY, 1.0)

    @classmethod
    def always_a0(cls):
        return cls(ALWAYS_A0, 1.0)

    @property
    def key(self):
        return self.theta, self.kind == ALWAYS_A0

    def __lt__(self, other):
        return self.key < other.key

    @property
    def label(self):
        return "1+" if self.kind == ALWAYS_A0 else f"{self.theta:g}"

    def acts(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == ALWAYS_A0:
            return np.zeros(x.shape, dtype=bool)
        return x >= self.theta

    def push(self, mu, xi, operator=None):
        # On laws the boundary threshold behaves as 1+: the state reaches 1 with probability 0
        if self.kind == ALWAYS_A1:
            return reset_all(mu)
        if self.kind == INTERIOR:
            return push_threshold(mu, xi, self.theta, operator)
        return push_a0(mu, xi, operator)

    def reset_mass(self, mu):
        if self.kind == ALWAYS_A1:
            return mu.total_mass
        if self.kind == INTERIOR:
            return float(mu.masses.sum() - threshold_split(mu, self.theta).sum())
        return 0.0


def classify_threshold(
    continuation, reset_value, grid, tie_tol=TIE_TOL, xtol=BISECTION_XTOL
):
    """Threshold from the continuation values rho*G on the grid and the reset value.

    Ties go to the reset action, and equality at x = 1 is the boundary case.
    """
    gap = np.asarray(continuation, dtype=float) - reset_value
    tol = tie_tol * max(1.0, abs(reset_value))
    if gap[0] >= -tol:
        return ThresholdDescriptor.always_a1()
    if gap[-1] < -tol:
        return ThresholdDescriptor.always_a0()
    if gap[-1] <= tol:
        return ThresholdDescriptor.boundary()

    slack = max(tol, 1e-9 * max(1.0, abs(reset_value)))
    if np.any(np.diff(gap) < -slack):
        raise MonotonicityError(
            f"Continuation gap decreases by {-np.diff(gap).min():.3g} on the grid"
        )
    try:
        theta = bisect(lambda x: np.interp(x, grid, gap), grid[0], grid[-1], xtol=xtol)
    except ValueError as e:
        raise MonotonicityError(f"Threshold bisection failed: {e}")
    return ThresholdDescriptor.interior(theta)


class PolicySchedule:
    """Per-time thresholds for t = 0..T; the terminal entry never resets."""

    def __init__(self, descriptors):
        self.descriptors = list(descriptors) + [ThresholdDescriptor.always_a0()]

    @classmethod
    def constant(cls, descriptor, T):
        return cls([descriptor] * T)

    @property
    def T(self):
        return len(self.descriptors) - 1

    def __len__(self):
        return len(self.descriptors)

    def __getitem__(self, t):
        return self.descriptors[t]

    def __iter__(self):
        return iter(self.descriptors)

    def positive_threshold_violations(self, c):
        """Times t < T whose threshold falls below c (uniform positivity flag)."""
        return [t for t, d in enumerate(self.descriptors[:-1]) if d.theta < c]

    def to_frame(self):
        return pd.DataFrame(
            {
                "t": np.arange(len(self)),
                "theta_kind": [d.kind for d in self.descriptors],
                "theta_value": [d.theta for d in self.descriptors],
            }
        )
