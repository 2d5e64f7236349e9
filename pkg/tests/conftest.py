from pathlib import Path

import numpy as np
import pytest

from stoplight.core import GAMMA_DEFAULT, SystemParams

GAMMA = GAMMA_DEFAULT
CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def gamma():
    return GAMMA


@pytest.fixture
def detuned():
    """Control and probe both 50 gamma below one-photon resonance."""
    return SystemParams(G=0.3 * GAMMA, Omega=1e-3 * GAMMA, Delta1=-50 * GAMMA, Delta2=-50 * GAMMA)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_params(rng, **fixed):
    """Random but well-conditioned parameters: at least one lower-level drive on."""
    g = GAMMA
    kw = dict(
        G=complex(rng.uniform(0.05, 1.0), rng.uniform(-0.3, 0.3)) * g,
        Omega=complex(rng.uniform(0.01, 1.0), rng.uniform(-0.3, 0.3)) * g,
        Delta1=rng.uniform(-5, 5) * g,
        Delta2=rng.uniform(-5, 5) * g,
        Delta3=rng.uniform(-1, 1) * g,
        Gamma12=rng.uniform(0, 0.5) * g,
        Gamma13=rng.uniform(0, 0.5) * g,
        Gamma23=rng.uniform(1e-3, 0.5) * g,
    )
    kw.update(fixed)
    return SystemParams(**kw)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
