import numpy as np
import pytest

import adaregret as ar


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def ball2():
    return ar.Domain.ball(np.zeros(2), 1.0)


@pytest.fixture
def box1():
    return ar.Domain.box(np.array([-1.0]), np.array([1.0]))


def make_absolute_stream(
    horizon, domain, G=1.0, target=(0.5,), noise=0.2, scale=None, seed=0
):
    params = {"target": list(target), "noise": noise}
    if scale is not None:
        params["scale"] = scale
    cfg = ar.StreamConfig(
        horizon=horizon,
        dimension=domain.dim,
        domain=domain,
        gradient_bound=G,
        segments=[ar.SegmentSpec(horizon, "absolute", params=params)],
        seed=seed,
    )
    return ar.generate_stream(cfg, validate=False)
