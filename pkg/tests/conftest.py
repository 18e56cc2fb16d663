"""Shared fixtures: parameter sets, cached coefficient evaluation and
golden-file loading.

Coefficient evaluations are memoized per session because several suites
(and most acceptance criteria) walk the same fixture grid; the cache cuts
the wall time roughly in half without changing any value.
"""

import json
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

from qbrownian.params import OccupationModel, PhysicalParams
from qbrownian.spectral import coefficients

GOLDEN_DIR = Path(__file__).parent / "golden"

# the three parameter sets used across the suites
FIXTURE_PARAMS = {
    "P1": PhysicalParams(),
    "P2": PhysicalParams(m=2.0, omega=2.0, gamma=0.5, alpha=5.0, T=10.0),
    "P3": PhysicalParams(m=0.5, omega=0.5, gamma=1.0, alpha=20.0, T=1.0),
}

# dimensionless times alpha*t for the coefficient grid
FIXTURE_ALPHA_T = (0.02, 0.06, 0.2, 0.6, 2.0, 6.0, 15.0, 40.0)


@lru_cache(maxsize=None)
def cached_coefficients(t, model, params, rel_tol=1e-8):
    return coefficients(t, model, params, rel_tol)


def load_golden(name: str):
    with (GOLDEN_DIR / name).open() as fh:
        return json.load(fh)


def random_valid_params(rng: np.random.Generator) -> PhysicalParams:
    """A parameter set satisfying all construction invariants."""
    alpha = float(10.0 ** rng.uniform(-0.3, 1.7))
    gamma = float(alpha / 3.0 * rng.uniform(0.05, 0.99))
    omega = float((alpha - gamma) * rng.uniform(0.05, 0.95))
    return PhysicalParams(
        m=float(10.0 ** rng.uniform(-1, 1)),
        omega=omega,
        gamma=gamma,
        alpha=alpha,
        T=float(10.0 ** rng.uniform(-2, 4)),
        hbar=float(10.0 ** rng.uniform(-1, 1)),
        k=float(10.0 ** rng.uniform(-1, 1)),
    )


@pytest.fixture(scope="session")
def p1():
    return FIXTURE_PARAMS["P1"]


@pytest.fixture(scope="session")
def p2():
    return FIXTURE_PARAMS["P2"]


@pytest.fixture(scope="session")
def p3():
    return FIXTURE_PARAMS["P3"]


@pytest.fixture(scope="session")
def coeffs_cached():
    return cached_coefficients


@pytest.fixture(scope="session")
def all_models():
    return tuple(OccupationModel)
