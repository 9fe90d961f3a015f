import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from smcsmooth.fk import make_cloud  # noqa: E402
from smcsmooth.models import LinearGaussianFK, scalar_model  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_skeleton(rng, N=5, T=1, sigma_y=0.5, y=None):
    """A scalar linear-Gaussian model plus hand-built clouds with random states and weights."""
    model = scalar_model(sigma_y)
    y = np.zeros(T + 1) if y is None else y
    fk = LinearGaussianFK(model, y)
    clouds = []
    for t in range(T + 1):
        x = rng.normal(0.0, 1.2, size=(N, 1))
        logw = rng.normal(0.0, 0.7, size=N)
        anc = None if t == 0 else rng.integers(0, N, size=N)
        clouds.append(make_cloud(t, x, logw, ancestors=anc))
    return fk, clouds


@pytest.fixture
def skeleton(rng):
    return make_skeleton(rng)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
