import numpy as np
import pytest
from hypothesis import settings

from matmeans.sampler import SamplerConfig, random_pair, random_spd

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def pair(n=4, seed=0, kappa=10.0):
    return random_pair(SamplerConfig(n, kappa, seed))


def one(n=4, seed=0, kappa=10.0):
    return random_spd(SamplerConfig(n, kappa, seed))


def rel_fro(x, y):
    x, y = np.asarray(x), np.asarray(y)
    return np.linalg.norm(x - y) / max(np.linalg.norm(y), 1e-300)


def np_power(a, t):
    """Independent oracle: numpy eigh based real power."""
    w, v = np.linalg.eigh(np.asarray(a))
    return (v * w ** t) @ v.conj().T


def np_sharp(a, b, t):
    ah = np_power(a, 0.5)
    aih = np_power(a, -0.5)
    return ah @ np_power(aih @ np.asarray(b) @ aih, t) @ ah


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(LINES, key=lambda k: (int(k.split()[1]), k)):
            terminalreporter.write_line(LINES[key])
