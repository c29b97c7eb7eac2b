import numpy as np

from utils import batch_means, batch_means_se, combined_se, standard_error


def test_standard_error():
    assert np.isclose(standard_error([1.0, 3.0]), 1.0)
    assert np.isnan(standard_error([1.0]))


def test_batch_means():
    means = batch_means(np.arange(10.0), 5)
    assert np.allclose(means, [0.5, 2.5, 4.5, 6.5, 8.5])


def test_batch_means_se_of_iid_series():
    values = np.random.default_rng(0).normal(size=10 ** 5)
    assert np.isclose(batch_means_se(values, 100), 1 / np.sqrt(10 ** 5), rtol=0.3)


def test_combined_se():
    assert np.isclose(combined_se(3.0, 4.0), 5.0)
