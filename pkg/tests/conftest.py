"""Shared fixtures: reference marginals and small hand-checkable laws."""

import numpy as np
import pytest

from zrcrit.marginal import Marginal, critical_stats
from zrcrit.models import Family, ModelSpec


@pytest.fixture(scope="session")
def stretched_spec() -> ModelSpec:
    """g(n) = 1 + 2 / n^0.6."""
    return ModelSpec(family=Family.STRETCHED_RATES, b=2.0, lam=0.6)


@pytest.fixture(scope="session")
def stretched(stretched_spec: ModelSpec) -> Marginal:
    return critical_stats(stretched_spec)


@pytest.fixture(scope="session")
def power_law_spec() -> ModelSpec:
    """g(n) = 1 + 5 / n, with rho_c = 1/3, sigma^2 = 8/9 and p_n ~ 96 n^-5."""
    return ModelSpec(family=Family.POWER_LAW_RATES, b=5.0, lam=1.0)


@pytest.fixture(scope="session")
def power_law(power_law_spec: ModelSpec) -> Marginal:
    return critical_stats(power_law_spec)


@pytest.fixture(scope="session")
def weights_spec() -> ModelSpec:
    """w(n) = exp(-(1 / 0.55) n^0.55)."""
    return ModelSpec(family=Family.EXPLICIT_STRETCHED_WEIGHTS, b=1.0, lam=0.45)


@pytest.fixture(scope="session")
def weights_marginal(weights_spec: ModelSpec) -> Marginal:
    return critical_stats(weights_spec)


@pytest.fixture
def uniform() -> Marginal:
    """Uniform law on {0, 1, 2}."""
    return Marginal.from_pmf([1 / 3, 1 / 3, 1 / 3])


@pytest.fixture
def coin() -> Marginal:
    """Fair coin on {0, 1}."""
    return Marginal.from_pmf([0.5, 0.5])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
