"""Tests for condensate observables and equivalence statistics."""

import numpy as np
import pytest

from zrcrit.errors import InsufficientSamplesError
from zrcrit.models import CaseLabel
from zrcrit.samplers.streams import replica_streams
from zrcrit.stats.batch import SampleBatch, exact_batch
from zrcrit.stats.observables import (
    chi_square_test,
    condensate_threshold,
    empirical_pmf,
    equivalence_test,
    excess_fraction,
    excess_fraction_rows,
    phase_mixture_test,
    second_max_summary,
    tv_distance,
)


def _batch(rows, N, regime=""):
    return SampleBatch.from_eta(np.array(rows), N, regime=regime)


def test_excess_fraction(uniform):
    """rho_c = 1 for the uniform law, so the excess at L = 2, N = 4 is 2."""
    batch = _batch([[4, 0], [2, 2], [3, 1], [1, 3]], 4)

    summary = excess_fraction(batch, uniform)

    np.testing.assert_allclose(summary.values, [2.0, 1.0, 1.5, 1.5])
    assert summary.mean == pytest.approx(1.5)
    assert summary.ci_lo < 1.5 < summary.ci_hi
    assert summary.to_row(batch).statistic == "excess_fraction"


def test_excess_fraction_undefined_at_criticality(uniform):
    with pytest.raises(ValueError, match="undefined"):
        excess_fraction(_batch([[1, 1]], 2), uniform)


def test_condensate_threshold(stretched):
    L, N = 100, 200
    k = N - stretched.rho_c * L

    assert condensate_threshold(stretched, L, N) == pytest.approx(0.5 * k)
    assert condensate_threshold(stretched, L, N, CaseLabel.SE_C) == pytest.approx(0.375 * k)


def test_phase_mixture(uniform):
    """Excess 4 at L = 2, N = 6; threshold 2 splits the replicas."""
    batch = _batch([[6, 0], [5, 1], [3, 3], [4, 2]], 6)

    mixture = phase_mixture_test(batch, uniform, predicted=0.5)

    assert mixture.threshold == pytest.approx(2.0)
    assert mixture.condensed == 4
    assert mixture.fraction == 1.0
    assert not mixture.both_phases
    assert mixture.ci_lo < 1.0
    assert mixture.p_value is not None
    assert [row.statistic for row in mixture.to_rows(batch)] == ["condensed_fraction", "p_gamma", "condensed_excess_fraction"]


def test_phase_mixture_uses_case_threshold(stretched):
    """A batch labelled SE-c is split at (lambda/(1+lambda)) times the excess."""
    L, N = 4, 20
    eta = [[14, 2, 2, 2], [6, 6, 4, 4], [5, 5, 5, 5]]
    batch = _batch(eta, N, regime=CaseLabel.SE_C.value)

    mixture = phase_mixture_test(batch, stretched)

    assert mixture.threshold == pytest.approx(0.375 * (N - stretched.rho_c * L))
    assert mixture.condensed == 1
    assert mixture.both_phases
    assert mixture.predicted is None
    assert mixture.p_value is None


def test_second_max_summary():
    batch = _batch([[4, 0], [3, 1], [2, 2]], 4)

    summary = second_max_summary(batch, levels=(0.5,))

    assert summary.quantiles[0.5] == 1.0
    assert summary.median_ratio == pytest.approx(1.0 / 3.0)
    assert summary.mean == pytest.approx(1.0)


def test_empirical_pmf_and_tv():
    pmf = empirical_pmf(np.array([0, 1, 1, 3, 9]), 3)

    np.testing.assert_allclose(pmf, [0.2, 0.4, 0.0, 0.2])
    assert tv_distance([0.5, 0.5], [0.5, 0.5]) == 0.0
    assert tv_distance([1.0], [0.0, 1.0]) == pytest.approx(1.0)
    assert tv_distance([0.5, 0.5], [0.25, 0.25, 0.5]) == pytest.approx(0.5)


def test_chi_square_perfect_fit():
    probabilities = np.array([0.25, 0.25, 0.5])

    statistic, p_value, dof = chi_square_test(np.array([25, 25, 50]), probabilities)

    assert statistic == pytest.approx(0.0)
    assert p_value == pytest.approx(1.0)
    assert dof == 2


def test_chi_square_pools_sparse_bins():
    """The two sparse right-hand bins are pooled into one."""
    _, _, dof = chi_square_test(np.array([50, 45, 3, 2]), np.array([0.5, 0.45, 0.03, 0.02]))

    assert dof == 2


def test_chi_square_insufficient_samples():
    with pytest.raises(InsufficientSamplesError):
        chi_square_test(np.array([1, 1]), np.array([0.5, 0.5]))


def test_equivalence_test_below_criticality(uniform):
    """Below rho_c the bulk single-site law approaches nu_phi at the fugacity of N/L."""
    batch = exact_batch(uniform, 50, 40, replica_streams(5, 200))

    result = equivalence_test(batch, uniform)

    assert 0.0 < result.phi < 1.0
    assert result.sites == batch.size * 50
    assert result.tv < 0.1


def test_equivalence_needs_configurations(uniform):
    batch = SampleBatch.from_eta(np.array([[1, 1]]), 2, keep_eta=False)

    with pytest.raises(ValueError, match="keep_eta"):
        equivalence_test(batch, uniform)


def test_excess_fraction_rows(stretched):
    batch = _batch([[30, 1, 1], [25, 4, 3]], 32)

    rows = excess_fraction_rows(batch, stretched)

    assert [row.statistic for row in rows] == ["excess_fraction", "second_max_median_ratio", "mean_maximum"]
    assert rows[2].value == pytest.approx(27.5)
