import sys

import numpy as np
import pytest

from otr import Dataset, SimulationSpec, generate_dataset
from otr._rng import stream


def random_instance(rng, n=None, p=None):
    """Small random sample with an intercept column and both arms present."""
    n = int(rng.integers(5, 40)) if n is None else n
    p = int(rng.integers(2, 5)) if p is None else p
    X = np.column_stack([np.ones(n), rng.standard_normal((n, p - 1))])
    A = rng.integers(0, 2, size=n).astype(float)
    A[0], A[1] = 0.0, 1.0
    Y = rng.standard_normal(n) + 1.0
    return Dataset(X, A, Y)


def setting_data(setting="s1", n=300, seed=0, key=0):
    spec = SimulationSpec(setting=setting, n=n, replicates=1, seed=seed)
    return generate_dataset(spec, stream(seed, 0, key))[0]


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
