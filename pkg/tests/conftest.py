import numpy as np
import pytest

from tanlift import base as B
from tanlift.verify import sample_points

_ACCEPTANCE_LINES = []


def family_specs(n, seed=7):
    """The three built-in families plus one random custom metric."""
    rng = np.random.default_rng([seed, n])
    return [
        B.MetricSpec.euclidean(n),
        B.MetricSpec.constant_curvature(n, 1.0),
        B.MetricSpec.constant_curvature(n, -1.0),
        B.random_quadratic_metric(n, rng),
    ]


def points_for(spec, count=10, seed=3):
    return sample_points(spec, count, seed)


@pytest.fixture
def acceptance():
    def record(number, ok, message):
        line = f"ACCEPTANCE {number:>2}: {'PASS' if ok else 'FAIL'}  {message}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
