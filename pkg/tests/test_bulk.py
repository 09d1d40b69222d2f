"""Tests for bulk partial-sum paths."""

import numpy as np
import pytest

from zrcrit.samplers.streams import replica_streams
from zrcrit.stats.batch import SampleBatch, exact_batch
from zrcrit.stats.bulk import PathMode, bridge_covariance, bulk_paths, drift_variance, path_covariance, truncation_level


def test_bridge_covariance():
    np.testing.assert_allclose(
        bridge_covariance((0.25, 0.5, 0.75)),
        [[0.1875, 0.125, 0.0625], [0.125, 0.25, 0.125], [0.0625, 0.125, 0.1875]],
    )


def test_truncation_level():
    assert truncation_level(16) == 2
    assert truncation_level(1) == 1


def test_x_paths_are_pinned(uniform):
    """X paths start and end at zero."""
    batch = SampleBatch.from_eta(np.array([[2, 0, 1, 1], [0, 2, 2, 0]]), 4)

    paths = bulk_paths(batch, uniform)

    assert paths.values.shape == (2, 5)
    np.testing.assert_allclose(paths.values[:, 0], 0.0)
    np.testing.assert_allclose(paths.values[:, -1], 0.0, atol=1e-12)
    sigma = uniform.sigma
    assert paths.values[0, 1] == pytest.approx(1.0 / (sigma * 2.0))


def test_y_paths_drop_large_sites(uniform):
    """With L = 16 the truncation level is 2, so the 9 is left out of the partial sums."""
    eta = np.zeros((1, 16), dtype=np.int64)
    eta[0, 0] = 9
    eta[0, 1:8] = 1
    batch = SampleBatch.from_eta(eta, 16)

    paths = bulk_paths(batch, uniform, mode=PathMode.Y, a_L=1.0)

    # center = N - (N - rho_c L) = 16
    scale = uniform.sigma * 4.0
    assert paths.values[0, 1] == pytest.approx(-1.0 / scale)
    assert paths.values[0, -1] == pytest.approx((7 - 16) / scale)


def test_y_paths_need_a(uniform):
    batch = SampleBatch.from_eta(np.array([[1, 1]]), 2)

    with pytest.raises(ValueError, match="a_L"):
        bulk_paths(batch, uniform, mode=PathMode.Y)


def test_paths_need_configurations(uniform):
    batch = SampleBatch.from_eta(np.array([[1, 1]]), 2, keep_eta=False)

    with pytest.raises(ValueError, match="keep_eta"):
        bulk_paths(batch, uniform)


def test_x_paths_approach_a_bridge(uniform):
    """Below criticality the X-path covariance is close to min(s, r) - s r."""
    batch = exact_batch(uniform, 64, 48, replica_streams(17, 1500))

    covariance = path_covariance(bulk_paths(batch, uniform))

    assert covariance.shape == (3, 3)
    # sigma is the critical variance; nu_phi below criticality is narrower
    assert np.all(np.diag(covariance) < np.diag(bridge_covariance()) * 1.2)
    assert covariance[1, 1] == pytest.approx(covariance[0, 0] * 4 / 3, rel=0.25)


def test_drift_variance_prediction(uniform):
    rng = np.random.default_rng(3)
    rows = [row for row in rng.integers(0, 3, size=(5000, 8)) if row.sum() == 8][:400]
    batch = SampleBatch.from_eta(np.array(rows), 8)

    summary = drift_variance(bulk_paths(batch, uniform, mode=PathMode.Y, a_L=0.5), lam=0.6, a=0.75)

    assert summary.predicted_variance == pytest.approx(1.0 / (1.0 - 0.6 * 0.25 / 0.75))
    assert summary.relative_error is not None
    assert summary.terminal_variance > 0.0
    assert -1.0 <= summary.bridge_correlation <= 1.0


def test_drift_without_prediction(uniform):
    batch = SampleBatch.from_eta(np.array([[2, 0, 1, 1], [0, 2, 2, 0], [1, 1, 1, 1]]), 4)

    summary = drift_variance(bulk_paths(batch, uniform, mode=PathMode.Y, a_L=1.0))

    assert summary.predicted_variance is None
    assert summary.relative_error is None
