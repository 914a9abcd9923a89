import numpy as np
import pytest

from depthprop import AffinityField, normalize


def random_field(rng, shape, kernel_size=3):
    """Normalized random affinity field for a grid of the given shape."""
    raw = rng.standard_normal((kernel_size * kernel_size - 1, *shape)).astype(np.float32)
    return normalize(AffinityField(kernel_size=kernel_size, planes=raw))


def random_depth(rng, shape, low=1.0, high=80.0):
    return rng.uniform(low, high, size=shape).astype(np.float32)


def sparse_depth(rng, shape, density, low=1.0, high=80.0):
    """Sparse grid with roughly `density` valid pixels."""
    dense = random_depth(rng, shape, low, high)
    return np.where(rng.random(shape) < density, dense, 0.0).astype(np.float32)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
