import numpy as np
import pytest

from l0breaks import Dataset, SegmentCostEngine


def random_instance(rng, T, p, jump=None):
    """Random regression sample, optionally with a mid-sample jump."""
    X = rng.standard_normal((T, p))
    y = rng.standard_normal(T)
    if jump is not None:
        y[T // 2 :] += jump
    return Dataset(y=y, X=X)


@pytest.fixture
def step_engine():
    """Clean two-level series: six points, exact break at index 3."""
    data = Dataset(y=np.array([0.0, 0, 0, 2, 2, 2]), X=np.ones((6, 1)))
    return SegmentCostEngine(data)
