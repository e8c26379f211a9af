import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from metric_coreset import kernels  # noqa: E402
from metric_coreset.metric import MetricSpace  # noqa: E402


def random_explicit_metric(rng, n):
    """Shortest-path closure of random positive weights: always a metric."""
    W = rng.uniform(0.5, 10.0, size=(n, n))
    W = np.minimum(W, W.T)
    np.fill_diagonal(W, 0.0)
    for z in range(n):
        W = np.minimum(W, W[:, z, None] + W[None, z, :])
    return W


def random_space(rng, n, kind=None):
    kind = kind or rng.choice(["e1", "e2", "e5", "matrix"])
    if kind == "matrix":
        return MetricSpace.explicit(random_explicit_metric(rng, n))
    dim = int(kind[1:])
    return MetricSpace.euclidean(rng.normal(size=(n, dim)) * rng.uniform(0.5, 20))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=["numba", "numpy"])
def impl(request):
    if request.param == "numba" and kernels.numba_impl is None:
        pytest.skip("numba unavailable")
    return kernels.numba_impl if request.param == "numba" else kernels.numpy_impl


@pytest.fixture
def line4():
    """The 1-D instance {0, 1, 10, 11}."""
    return MetricSpace.euclidean([0.0, 1.0, 10.0, 11.0])


#: (criterion, passed, summary) lines collected by the acceptance suite
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number, passed, text in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {text}")
