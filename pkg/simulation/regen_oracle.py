from dataclasses import asdict, dataclass

import numpy as np
from joblib import Parallel, delayed

from config import CYCLE_STEP_CAP, N_BATCHES, N_CYCLES, PATH_HORIZON, RANDOM_STATE
from utils import batch_means_se, standard_error


@dataclass
class RegenEstimate:
    """Cycle-ratio estimate of the stationary mean under threshold theta.

    A cycle starts right after a reset (distance to 1 equal to 1) and ends at the
    first step where the distance to 1 is at most lam = 1 - theta.
    """

    theta: float
    lam: float
    n_cycles: int
    mean_tau: float
    mean_s: float
    z_est: float
    se_z: float
    se_tau: float
    alpha: float
    alpha_se: float

    @property
    def pi0(self):
        """Renewal estimate of the stationary mass at the resetting point."""
        return 1 / (1 + self.mean_tau)

    def to_dict(self):
        return {**asdict(self), "pi0": self.pi0}


@dataclass
class PathAverage:
    mean: float
    se: float


def simulate_cycles(lam, xi, n_cycles, random_state, step_cap=CYCLE_STEP_CAP):
    """Cycle lengths tau, cycle sums S and the innovation bookkeeping for alpha."""
    y = np.ones(n_cycles)
    s = np.ones(n_cycles)
    tau = np.zeros(n_cycles, dtype=int)
    complement_sum, draws_count = 0.0, 0
    active = np.arange(n_cycles)
    steps = 0
    while len(active):
        steps += 1
        if steps > step_cap:
            raise RuntimeError(
                f"{len(active)} cycles still running after {step_cap} steps; "
                f"check the sampler of {xi}"
            )
        complement = 1 - xi.sample(random_state, len(active))
        complement_sum += complement.sum()
        draws_count += len(active)
        y[active] *= complement
        s[active] += y[active]
        tau[active] += 1
        active = active[y[active] > lam]
    return tau, s, complement_sum, draws_count


def _simulate_batch(lam, xi, n_cycles, seed_sequence, step_cap):
    random_state = np.random.default_rng(seed_sequence)
    tau, s, complement_sum, draws_count = simulate_cycles(
        lam, xi, n_cycles, random_state, step_cap
    )
    return tau.sum(), s.sum(), complement_sum, draws_count, n_cycles


def regen_estimate(
    theta,
    xi,
    n_cycles=N_CYCLES,
    seed=RANDOM_STATE,
    n_batches=N_BATCHES,
    n_jobs=1,
    step_cap=CYCLE_STEP_CAP,
):
    """Batches get their own child seeds, so the estimate does not depend on n_jobs."""
    if not 0 < theta < 1:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    if n_cycles < 1000:
        raise ValueError(f"At least 1000 cycles are needed, got {n_cycles}")
    lam = 1 - theta
    sizes = [len(block) for block in np.array_split(np.arange(n_cycles), n_batches)]
    seeds = np.random.SeedSequence(seed).spawn(n_batches)
    batches = Parallel(n_jobs=n_jobs)(
        delayed(_simulate_batch)(lam, xi, size, seed_sequence, step_cap)
        for size, seed_sequence in zip(sizes, seeds)
    )
    tau_sum, s_sum, complement_sum, draws_count, counts = np.array(batches, dtype=float).T

    mean_tau = tau_sum.sum() / n_cycles
    mean_s = s_sum.sum() / n_cycles
    batch_tau = tau_sum / counts
    batch_z = 1 - (s_sum / counts) / (1 + batch_tau)
    return RegenEstimate(
        theta=theta,
        lam=lam,
        n_cycles=n_cycles,
        mean_tau=mean_tau,
        mean_s=mean_s,
        z_est=1 - mean_s / (1 + mean_tau),
        se_z=standard_error(batch_z),
        se_tau=standard_error(batch_tau),
        alpha=complement_sum.sum() / draws_count.sum(),
        alpha_se=standard_error(complement_sum / draws_count),
    )


def long_run_mean_by_path(
    theta, xi, horizon=PATH_HORIZON, seed=RANDOM_STATE, x0=0.0, n_batches=N_BATCHES
):
    """Time average of one threshold-controlled trajectory, with batch-means SE."""
    if not 0 < theta < 1:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    random_state = np.random.default_rng(seed)
    innovations = xi.sample(random_state, horizon).tolist()
    path = np.empty(horizon)
    x = float(x0)
    for t, u in enumerate(innovations):
        path[t] = x
        x = 0.0 if x >= theta else x + (1 - x) * u
    return PathAverage(float(path.mean()), batch_means_se(path, n_batches))
