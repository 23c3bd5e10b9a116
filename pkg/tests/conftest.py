import numpy as np
import pytest

from freshroute.domain import Instance, Network, ProductSpec
from freshroute.kinetics import Q10Params


def small_product(k=0, window=10.0, ideal=5.0, lo=2.0, hi=8.0, demand=1.0):
    return ProductSpec(k, f"p{k}", ideal, lo, hi, window + 1.0, 1.0, demand, Q10Params(2.0))


def toy_instance(travel, delay=None, products=None, **kw):
    travel = np.asarray(travel, dtype=float)
    n = travel.shape[0]
    delay = np.zeros(n) if delay is None else np.asarray(delay, dtype=float)
    return Instance(Network(travel, delay), tuple(products or (small_product(),)), **kw)


@pytest.fixture
def seeded_instance():
    from freshroute.scenarios import experiment_instance

    return experiment_instance(seed=11)
