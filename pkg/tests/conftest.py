import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from photomem.model import AfcParams, SystemParams, afc_effective_params, threshold_analytic

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

MHZ = 1e6  # angular convention: "150 MHz" is 1.5e8 rad/s


@pytest.fixture
def c1_params():
    """2G = Gamma = kappa = 1 (cooperativity 1)."""
    return SystemParams(kappa=1.0, lam=0.1, g_coll=0.5, gamma_inh=1.0)


@pytest.fixture
def table1_params():
    """Example device with the comb finesse folded in."""
    bare = SystemParams(kappa=150 * MHZ, lam=40 * MHZ, g_coll=300 * MHZ, gamma_inh=150 * MHZ)
    return afc_effective_params(bare, AfcParams(finesse=3.0, comb_spacing=1 * MHZ))


def log_uniform(lo, hi):
    return st.floats(math.log(lo), math.log(hi)).map(math.exp)


@st.composite
def stable_params(draw, max_fraction=0.95):
    kappa = draw(log_uniform(0.01, 100.0))
    gamma = draw(log_uniform(0.01, 100.0))
    g = draw(st.floats(0.0, 10.0))
    base = SystemParams(kappa=kappa, lam=0.0, g_coll=g, gamma_inh=gamma)
    frac = draw(st.floats(0.0, max_fraction))
    return base.replace(lam=frac * threshold_analytic(kappa, gamma, g))


def random_stable_params(rng: np.random.Generator, n: int, max_fraction: float = 0.95):
    """Vectorizable random parameter sets as arrays (kappa, gamma, g, lam)."""
    kappa = np.exp(rng.uniform(math.log(0.01), math.log(100.0), n))
    gamma = np.exp(rng.uniform(math.log(0.01), math.log(100.0), n))
    g = rng.uniform(0.0, 10.0, n)
    lam = rng.uniform(0.0, max_fraction, n) * threshold_analytic(kappa, gamma, g)
    return kappa, gamma, g, lam


# Acceptance criteria record one line each; printed after the run.
ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    rows = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def record(number: int, title: str, passed: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {title} ({detail})"
        rows.append((number, line))
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = config.stash.get(ACCEPTANCE_KEY, [])
    if rows:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(rows):
            terminalreporter.write_line(line)
