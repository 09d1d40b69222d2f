"""Tests for the exact law of S_L and the conditional oracle."""

import math

import numpy as np
import pytest
from scipy import special

from zrcrit.errors import BudgetExceededError, ImpossibleNError
from zrcrit.oracle import (
    conditional_max_cdf,
    conditional_site_marginal,
    default_n_max,
    exact_pSLN,
    log_convolve,
    oracle_condensed_probability,
    power_tables,
    sum_distribution,
)


def test_coin_sum_is_binomial(coin):
    """S_4 of fair coins is Binomial(4, 1/2)."""
    law = sum_distribution(coin, 4, n_max=4)

    expected = [math.log(special.comb(4, n) / 16.0) for n in range(5)]
    np.testing.assert_allclose(law.log_pS, expected, atol=1e-12)
    assert law.total_mass() == pytest.approx(1.0)
    assert law.to_rows()[2] == (2, pytest.approx(math.log(6.0 / 16.0)))


def test_exact_pSLN_small_uniform(uniform):
    """Two uniform sites on {0, 1, 2}: P[S_2 = 2] = 3/9."""
    assert exact_pSLN(uniform, 2, 2) == pytest.approx(math.log(1.0 / 3.0))
    assert exact_pSLN(uniform, 2, 5) == -np.inf


def test_log_convolve_matches_direct_convolution():
    a = np.array([0.2, 0.5, 0.3])
    b = np.array([0.6, 0.4])

    result = np.exp(log_convolve(np.log(a), np.log(b), 3))

    np.testing.assert_allclose(result, np.convolve(a, b)[:4])


def test_power_tables_cover_every_split_size(uniform):
    tables = power_tables(uniform.log_p, 6, 12)

    for size in (1, 2, 4, 6):
        assert size in tables
        assert np.exp(special.logsumexp(tables[size])) == pytest.approx(1.0)


def test_sum_distribution_retains_almost_all_mass(stretched):
    law = sum_distribution(stretched, 16)

    assert law.n_max == default_n_max(stretched, 16)
    assert law.total_mass() == pytest.approx(1.0, abs=1e-8)


def test_capped_law_excludes_large_sites(uniform):
    """With every site <= 1, S_2 = 2 only through (1, 1)."""
    law = sum_distribution(uniform, 2, n_max=4, cap=1)

    assert law.log_p(2) == pytest.approx(math.log(1.0 / 9.0))
    assert law.log_p(4) == -np.inf
    with pytest.raises(ValueError):
        law.log_p(5)


def test_budget_is_enforced(stretched):
    with pytest.raises(BudgetExceededError):
        sum_distribution(stretched, 1024, budget=1.0)


def test_conditional_max_cdf_small_case(uniform):
    """Given S_2 = 2 the configurations (2,0), (1,1), (0,2) are equally likely."""
    cdf = conditional_max_cdf(uniform, 2, 2, [0, 1, 2, 3])

    np.testing.assert_allclose(cdf, [0.0, 1.0 / 3.0, 1.0, 1.0])
    assert oracle_condensed_probability(uniform, 2, 2, threshold=1.0) == pytest.approx(2.0 / 3.0)


def test_conditional_max_cdf_rejects_impossible_N(uniform):
    with pytest.raises(ImpossibleNError):
        conditional_max_cdf(uniform, 2, 5, [1])


def test_conditional_site_marginal_is_site_independent(stretched):
    """Every site has the same conditional law, whichever path computed it."""
    first = conditional_site_marginal(stretched, 5, 12, site=0)
    middle = conditional_site_marginal(stretched, 5, 12, site=2)
    last = conditional_site_marginal(stretched, 5, 12, site=4)

    assert first.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(first, middle, atol=1e-12)
    np.testing.assert_allclose(first, last, atol=1e-12)
    # mean occupation is N / L
    assert np.dot(np.arange(first.size), first) == pytest.approx(12.0 / 5.0)


def test_conditional_site_marginal_validates_site(uniform):
    with pytest.raises(ValueError, match="site"):
        conditional_site_marginal(uniform, 3, 2, site=3)


def test_exact_pSLN_rejects_negative_N(uniform):
    with pytest.raises(ValueError):
        exact_pSLN(uniform, 3, -1)
