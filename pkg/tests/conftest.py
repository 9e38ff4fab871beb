import numpy as np
import pytest

from socialgf.examples import ExampleCategory, ExampleSet
from socialgf.scorefield import GFTrainConfig, train_gf


@pytest.fixture(scope="session")
def gaussian_set():
    """10k samples of an isotropic 2D Gaussian as a one-slot example set."""
    rng = np.random.default_rng(1234)
    mean = np.array([2.0, -1.0])
    std = 2.0
    cat = ExampleCategory("gauss", "attractive", "any", ("grass",))
    records = mean + std * rng.standard_normal((10000, 2))
    return ExampleSet(cat, ("grass",), records, {}), mean, std


@pytest.fixture(scope="session")
def gaussian_field(gaussian_set):
    """Field trained on the Gaussian set with a reduced (but passing) budget."""
    es, mean, std = gaussian_set
    field, curve = train_gf(es, GFTrainConfig(steps=6000), seed=21)
    return field, mean, std, curve


@pytest.fixture(scope="session")
def pointmass_field():
    cat = ExampleCategory("point", "attractive", "any", ("grass",))
    x0 = np.array([1.5, -2.0])
    es = ExampleSet(cat, ("grass",), np.tile(x0, (8, 1)), {})
    field, _ = train_gf(es, GFTrainConfig(steps=2500, batch_size=64), seed=3)
    return field, x0
