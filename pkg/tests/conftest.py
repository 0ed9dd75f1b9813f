import numpy as np
import pytest

from wtsp.core import Instance


def random_coords_instance(rng, n, weights="unit", box=100):
    """Euclidean instance with integer coordinates."""
    xy = rng.integers(0, box + 1, size=(n, 2))
    if not isinstance(weights, str):
        w = np.asarray(weights, dtype=float)
    elif weights == "unit":
        w = np.ones(n)
    elif weights == "C1":
        w = np.r_[1.0, np.full(n - 1, rng.uniform(0, 1))]
    elif weights == "C2":
        w = np.r_[1.0, rng.integers(1, 6, n - 1)]
    else:
        w = np.r_[1.0, rng.integers(0, 6, n - 1)]
    return Instance.from_coords(xy, w)


def random_tour(rng, n, start=0):
    rest = [c for c in rng.permutation(n).tolist() if c != start]
    return (start, *rest)


def one_two_instance(rng, n, p=0.5):
    m = np.where(rng.random((n, n)) < p, 1.0, 2.0)
    m = np.triu(m, 1)
    m = m + m.T
    return Instance.from_matrix(m)


def triangle(x=1000.0, eps=1.0, weights=(1, 1, 1)):
    """d(1,2)=eps, d(2,3)=x, d(1,3)=x."""
    m = np.array([[0, eps, x], [eps, 0, x], [x, x, 0]], dtype=float)
    return Instance.from_matrix(m, weights)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
