import numpy as np
import pytest
from hypothesis import settings

from besicovitch import TrigPolynomial

ACCEPTANCE_KEY = pytest.StashKey[list]()

settings.register_profile("default", deadline=None, max_examples=30)
settings.load_profile("default")


def random_poly(rng, m=5, n=1, spread=3.0, scale=1.0):
    """Random trig polynomial with ``m`` well separated frequencies."""
    while True:
        lam = rng.uniform(-spread, spread, size=(m, n))
        if m == 1 or min(np.linalg.norm(lam[i] - lam[j]) for i in range(m) for j in range(i)) > 0.3:
            break
    c = scale * (rng.normal(size=m) + 1j * rng.normal(size=m))
    return TrigPolynomial(lam, c)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
