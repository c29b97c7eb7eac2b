import numpy as np


def standard_error(values):
    values = np.asarray(values, dtype=float)
    if len(values) < 2:
        return float("nan")
    return float(np.std(values, ddof=1) / np.sqrt(len(values)))


def batch_means(values, n_batches):
    """Means of `n_batches` contiguous, nearly equal blocks of a series."""
    return np.array([block.mean() for block in np.array_split(values, n_batches)])


def batch_means_se(values, n_batches):
    return standard_error(batch_means(np.asarray(values, dtype=float), n_batches))


def combined_se(*standard_errors):
    return float(np.sqrt(np.sum(np.square(standard_errors))))
