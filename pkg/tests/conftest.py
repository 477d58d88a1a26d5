import numpy as np
import pytest

SEED = 12345


@pytest.fixture
def seed():
    return SEED


def zscore(est, target):
    return abs(est.mean - target) / est.stderr


def ks_two_sample(a, b):
    from scipy.stats import ks_2samp

    return ks_2samp(np.asarray(a), np.asarray(b)).pvalue
