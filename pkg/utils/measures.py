import numpy as np
import pandas as pd

from config import MASS_TOLERANCE
from .kernel import cell_widths, dual_cell_edges, get_operator, state_grid


class GridMeasure:
    """Atom at the resetting point 0 plus a density on the state grid.

    Node j stands for its dual cell, so `masses[j] = density[j] * cell_widths[j]`
    and every integral is the matching weighted sum over nodes.
    """

    def __init__(self, atom0, density):
        self.atom0 = float(atom0)
        self.density = np.array(density, dtype=float)
        self.density.setflags(write=False)
        self.grid = state_grid(len(self.density))
        self.cell_widths = cell_widths(self.grid)

    @classmethod
    def unit_atom(cls, n):
        return cls(1.0, np.zeros(n))

    @classmethod
    def point_mass(cls, x, n):
        """Unit mass at x; off-grid points are split between the two nearest nodes."""
        if not 0 <= x <= 1:
            raise ValueError(f"x must lie in [0, 1], got {x}")
        if x == 0:
            return cls.unit_atom(n)
        position = x * (n - 1)
        left = min(int(np.floor(position)), n - 2)
        frac = position - left
        masses = np.zeros(n)
        masses[left] += 1 - frac
        masses[left + 1] += frac
        return cls.from_masses(masses)

    @classmethod
    def atom_at_one(cls, n):
        return cls.point_mass(1.0, n)

    @classmethod
    def uniform(cls, n):
        return cls(0.0, np.ones(n))

    @classmethod
    def from_density(cls, density, n, atom0=0.0):
        grid = state_grid(n)
        values = np.asarray(density(grid) if callable(density) else density, float)
        total = values @ cell_widths(grid)
        if total <= 0:
            raise ValueError("density must have positive mass")
        return cls(atom0, values * (1 - atom0) / total)

    @classmethod
    def from_masses(cls, masses, atom0=0.0):
        masses = np.asarray(masses, dtype=float)
        return cls(atom0, masses / cell_widths(state_grid(len(masses))))

    @property
    def n(self):
        return len(self.grid)

    @property
    def masses(self):
        return self.density * self.cell_widths

    @property
    def total_mass(self):
        return self.atom0 + self.masses.sum()

    def check(self, tol=MASS_TOLERANCE):
        if self.atom0 < 0 or np.any(self.density < 0):
            raise ValueError("A measure cannot carry negative mass")
        if abs(self.total_mass - 1) > tol:
            raise ValueError(f"Total mass {self.total_mass} differs from 1")
        return self

    def mean(self):
        return float(self.masses @ self.grid)

    def integrate(self, values):
        values = np.asarray(values, dtype=float)
        return float(self.atom0 * values[0] + self.masses @ values)

    def sample(self, random_state, size):
        """Draw states from the atom and the grid nodes."""
        probabilities = np.clip(np.concatenate(([self.atom0], self.masses)), 0, None)
        states = np.concatenate(([0.0], self.grid))
        index = random_state.choice(
            len(states), size=size, p=probabilities / probabilities.sum()
        )
        return states[index]

    def to_frame(self):
        atom = np.zeros(self.n)
        atom[0] = self.atom0
        return pd.DataFrame({"x": self.grid, "density": self.density, "atom0": atom})


def _resolve_operator(mu, xi, operator):
    return get_operator(xi, mu.n) if operator is None else operator


def _checked(mu, pushed, tol=MASS_TOLERANCE):
    if abs(pushed.total_mass - mu.total_mass) > tol:
        raise RuntimeError(
            f"Measure push lost mass: {mu.total_mass} -> {pushed.total_mass}"
        )
    return pushed


def push_a0(mu, xi, operator=None):
    operator = _resolve_operator(mu, xi, operator)
    masses = mu.atom0 * operator.matrix[0] + operator.push(mu.masses)
    return _checked(mu, GridMeasure.from_masses(masses, atom0=0.0))


def threshold_split(mu, r):
    """Masses below r, allotted pro rata inside the cell containing r."""
    edges = dual_cell_edges(mu.grid)
    below = np.clip((r - edges[:-1]) / mu.cell_widths, 0.0, 1.0)
    return mu.masses * below


def push_threshold(mu, xi, r, operator=None):
    if not 0 < r <= 1:
        raise ValueError(f"Threshold must lie in (0, 1], got {r}")
    operator = _resolve_operator(mu, xi, operator)
    staying = threshold_split(mu, r)
    reset = mu.masses.sum() - staying.sum()
    masses = mu.atom0 * operator.matrix[0] + operator.push(staying)
    return _checked(mu, GridMeasure.from_masses(masses, atom0=reset))


def reset_all(mu):
    return GridMeasure(mu.total_mass, np.zeros(mu.n))


def mean(mu):
    return mu.mean()


def tv_distance(mu1, mu2):
    if mu1.n != mu2.n:
        raise ValueError(f"Measures live on different grids ({mu1.n} vs {mu2.n})")
    return 0.5 * (
        abs(mu1.atom0 - mu2.atom0) + np.abs(mu1.masses - mu2.masses).sum()
    )
