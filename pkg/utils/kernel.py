from functools import cached_property, lru_cache

import numpy as np
from scipy import stats

from config import GRID_N, XI_GRID_N
from .errors import ModelValidationError


def state_grid(n=GRID_N):
    if n < 2:
        raise ValueError(f"A state grid needs at least 2 nodes, got {n}")
    return np.linspace(0.0, 1.0, n)


def dual_cell_edges(grid):
    """Edges of the cells centred on the grid nodes (half cells at 0 and 1)."""
    midpoints = 0.5 * (grid[1:] + grid[:-1])
    return np.concatenate(([grid[0]], midpoints, [grid[-1]]))


def cell_widths(grid):
    return np.diff(dual_cell_edges(grid))


class XiSpec:
    """Distribution of the innovation xi on [0, 1], backed by a frozen scipy law."""

    family = None

    def __init__(self, **params):
        self.params = {name: float(value) for name, value in params.items()}
        self.check_params()
        self.distribution = self.build_distribution()
        self.check_distribution()

    def check_params(self):
        pass

    def build_distribution(self):
        raise NotImplementedError

    def check_distribution(self):
        if abs(self.cdf(0.0)) > 1e-10 or abs(self.cdf(1.0) - 1.0) > 1e-10:
            raise ModelValidationError(
                f"{self.family} xi must put all its mass on [0, 1] "
                f"(F(0)={self.cdf(0.0)}, F(1)={self.cdf(1.0)})"
            )
        probes = np.linspace(0.01, 0.99, 99)
        if np.any(self.density(probes) <= 0):
            raise ModelValidationError(
                f"{self.family} xi density must be positive on (0, 1)"
            )

    def density(self, u):
        return self.distribution.pdf(np.clip(u, 0.0, 1.0))

    def cdf(self, u):
        return self.distribution.cdf(np.clip(u, 0.0, 1.0))

    def sample(self, random_state, size=None):
        return self.distribution.rvs(size=size, random_state=random_state)

    def mean(self):
        return float(self.distribution.mean())

    def to_dict(self):
        return {"family": self.family, "params": dict(self.params)}

    @staticmethod
    def from_dict(spec):
        family = spec.get("family")
        for xi_class in all_families:
            if xi_class.family == family:
                return xi_class(**spec.get("params", {}))
        raise ModelValidationError(
            f"Unknown xi family '{family}', expected one of "
            f"{[xi_class.family for xi_class in all_families]}"
        )

    def _key(self):
        return self.family, tuple(sorted(self.params.items()))

    def __eq__(self, other):
        return isinstance(other, XiSpec) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        params = ", ".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.family}({params})"


class UniformXi(XiSpec):
    family = "uniform"

    def build_distribution(self):
        return stats.uniform(loc=0.0, scale=1.0)


class BetaXi(XiSpec):
    family = "beta"

    def check_params(self):
        for name in ("a", "b"):
            if self.params.get(name, 0.0) <= 0:
                raise ModelValidationError(
                    f"beta xi needs {name} > 0, got {self.params.get(name)}"
                )

    def build_distribution(self):
        return stats.beta(self.params["a"], self.params["b"])


class TruncatedExpXi(XiSpec):
    family = "truncated_exp"

    def check_params(self):
        if self.params.get("rate", 0.0) <= 0:
            raise ModelValidationError(
                f"truncated_exp xi needs rate > 0, got {self.params.get('rate')}"
            )

    def build_distribution(self):
        rate = self.params["rate"]
        return stats.truncexpon(b=rate, scale=1.0 / rate)


all_families = [UniformXi, BetaXi, TruncatedExpXi]


def q0_next(x, u):
    x, u = np.asarray(x, dtype=float), np.asarray(u, dtype=float)
    for name, value in (("x", x), ("u", u)):
        if np.any((value < 0) | (value > 1)):
            raise ValueError(f"{name} must lie in [0, 1], got {value}")
    y = x + (1 - x) * u
    return y if y.ndim else float(y)


def xi_density(spec, u):
    value = spec.density(u)
    return value if np.ndim(value) else float(value)


def xi_sample(spec, stream, size=None):
    return spec.sample(stream, size)


def xi_quadrature(spec, m=XI_GRID_N):
    """Nodes and weights for integrals against F_xi.

    Each node carries the xi-mass of its dual cell, so the weights sum to one
    for every family and reduce to trapezoid weights for uniform xi.
    """
    nodes = state_grid(m)
    weights = np.diff(spec.cdf(dual_cell_edges(nodes)))
    return nodes, weights / weights.sum()


def q0_expectation(spec, x, h, grid=None, m=XI_GRID_N):
    if not 0 <= x <= 1:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    h = np.asarray(h, dtype=float)
    grid = state_grid(len(h)) if grid is None else grid
    nodes, weights = xi_quadrature(spec, m)
    return float(weights @ np.interp(x + (1 - x) * nodes, grid, h))


class TransitionOperator:
    """One-step law of x + (1 - x) xi on a uniform state grid.

    Row j of `matrix` holds the quadrature weights of xi spread linearly onto
    the grid nodes around x_j + (1 - x_j) u_k, so `matrix @ h` evaluates
    q0_expectation at every node and `masses @ matrix` pushes a measure.
    """

    block_size = 256

    def __init__(self, xi, grid_n=GRID_N, xi_grid_n=XI_GRID_N):
        self.xi = xi
        self.grid = state_grid(grid_n)
        self.cell_edges = dual_cell_edges(self.grid)
        self.cell_widths = np.diff(self.cell_edges)
        self.xi_nodes, self.xi_weights = xi_quadrature(xi, xi_grid_n)

    @property
    def n(self):
        return len(self.grid)

    @cached_property
    def matrix(self):
        n = self.n
        matrix = np.empty((n, n))
        for start in range(0, n, self.block_size):
            rows = np.arange(start, min(start + self.block_size, n))
            x = self.grid[rows, None]
            position = (x + (1 - x) * self.xi_nodes[None, :]) * (n - 1)
            left = np.clip(np.floor(position).astype(int), 0, n - 2)
            frac = np.clip(position - left, 0.0, 1.0)
            flat = (np.arange(len(rows))[:, None] * n + left).ravel()
            weights = np.broadcast_to(self.xi_weights, position.shape)
            size = len(rows) * n
            block = np.bincount(
                flat, weights=(weights * (1 - frac)).ravel(), minlength=size
            ) + np.bincount(flat + 1, weights=(weights * frac).ravel(), minlength=size)
            matrix[rows] = block.reshape(len(rows), n)
        return matrix

    def expectation(self, values):
        return self.matrix @ values

    def push(self, masses):
        return masses @ self.matrix


@lru_cache(maxsize=4)
def get_operator(xi, grid_n=GRID_N, xi_grid_n=XI_GRID_N):
    return TransitionOperator(xi, grid_n, xi_grid_n)
