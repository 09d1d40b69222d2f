"""Tests for kinetic Monte Carlo of the zero-range process."""

import numpy as np
import pytest

from zrcrit.models import Configuration
from zrcrit.samplers.kmc import DynamicsSpec, HopKernel, RateTree, kmc_run
from zrcrit.samplers.mcmc import initial_configuration


def _init(L: int, N: int) -> Configuration:
    return Configuration(eta=initial_configuration(L, N), N=N)


def test_rate_tree_selection_and_update():
    tree = RateTree(np.array([1.0, 2.0, 3.0]))

    assert tree.total == pytest.approx(6.0)
    assert tree.find(0.5) == 0
    assert tree.find(1.5) == 1
    assert tree.find(3.5) == 2

    tree.update(1, 0.0)
    assert tree.total == pytest.approx(4.0)
    assert tree.find(1.5) == 2


def test_rate_tree_single_site():
    tree = RateTree(np.array([2.5]))

    assert tree.total == pytest.approx(2.5)
    assert tree.find(1.0) == 0


def test_hop_probabilities_sum_to_one(stretched_spec):
    for hop in HopKernel:
        probabilities = DynamicsSpec(spec=stretched_spec, L=4, hop=hop).hop_probabilities()
        assert sum(probabilities.values()) == pytest.approx(1.0)


@pytest.mark.parametrize("hop", list(HopKernel))
def test_dynamics_conserve_particles(stretched_spec, rng, hop):
    dynamics = DynamicsSpec(spec=stretched_spec, L=10, hop=hop)

    result = kmc_run(dynamics, _init(10, 20), 50.0, rng)

    assert result.configuration.N == 20
    assert int(result.configuration.eta.sum()) == 20
    assert result.events > 0
    assert result.histogram.sum() == pytest.approx(1.0)


def test_zero_time_returns_initial_state(stretched_spec, rng):
    init = _init(6, 9)

    result = kmc_run(DynamicsSpec(spec=stretched_spec, L=6), init, 0.0, rng)

    assert result.events == 0
    np.testing.assert_array_equal(result.configuration.eta, init.eta)


def test_snapshots_at_regular_times(stretched_spec, rng):
    result = kmc_run(DynamicsSpec(spec=stretched_spec, L=8), _init(8, 8), 5.0, rng, snapshot_interval=1.0)

    assert result.snapshots.shape == (6, 8)
    assert (result.snapshots.sum(axis=1) == 8).all()


def test_invalid_arguments(stretched_spec, rng):
    dynamics = DynamicsSpec(spec=stretched_spec, L=5)

    with pytest.raises(ValueError, match="t_end"):
        kmc_run(dynamics, _init(5, 5), -1.0, rng)
    with pytest.raises(ValueError, match="sites"):
        kmc_run(dynamics, _init(4, 5), 1.0, rng)
    with pytest.raises(ValueError, match="snapshot_interval"):
        kmc_run(dynamics, _init(5, 5), 1.0, rng, snapshot_interval=0.0)


def test_same_seed_same_trajectory(stretched_spec):
    dynamics = DynamicsSpec(spec=stretched_spec, L=12, hop=HopKernel.SYMMETRIC)

    first = kmc_run(dynamics, _init(12, 15), 20.0, np.random.default_rng(3))
    second = kmc_run(dynamics, _init(12, 15), 20.0, np.random.default_rng(3))

    assert first.events == second.events
    np.testing.assert_array_equal(first.configuration.eta, second.configuration.eta)
