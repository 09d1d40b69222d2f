"""Tests for exponential tilting and tilted rejection sampling."""

import numpy as np
import pytest

from zrcrit.errors import BudgetExceededError, UnreachableError
from zrcrit.samplers.tilted import (
    TiltedRejectionSampler,
    solve_tilt,
    tilt,
    tilted_max_cdf,
    tilted_rejection_sample,
)


def test_zero_tilt_is_the_critical_law(stretched):
    tilted = tilt(stretched, None, 0.0)

    assert tilted.s == 0.0
    assert tilted.rho == stretched.rho_c
    assert tilted.Z == pytest.approx(1.0)
    np.testing.assert_allclose(tilted.q, stretched.p, atol=1e-12)


def test_uncapped_positive_tilt_is_unreachable(stretched):
    with pytest.raises(UnreachableError):
        tilt(stretched, None, 0.1)


def test_solve_tilt_hits_target_mean(uniform):
    """Capped at 2, the uniform law can be tilted to any mean in (0, 2)."""
    for target in (0.3, 1.0, 1.7):
        tilted = solve_tilt(uniform, 2, target)
        assert tilted.rho == pytest.approx(target, abs=1e-10)
        assert tilted.q.sum() == pytest.approx(1.0)


def test_solve_tilt_downside_is_negative(stretched):
    tilted = solve_tilt(stretched, None, 0.5)

    assert tilted.s < 0.0
    assert tilted.rho == pytest.approx(0.5, abs=1e-10)


def test_solve_tilt_rejects_unreachable_targets(stretched, uniform):
    with pytest.raises(UnreachableError):
        solve_tilt(stretched, None, stretched.rho_c + 0.5)
    with pytest.raises(UnreachableError):
        solve_tilt(uniform, 2, 2.0)
    with pytest.raises(UnreachableError):
        solve_tilt(uniform, 2, 0.0)


def test_tilted_rejection_sample_respects_cap(stretched, rng):
    """Every accepted configuration sums to N with all sites <= cap."""
    for _ in range(20):
        configuration = tilted_rejection_sample(stretched, 50, 60, 10, rng)
        assert configuration.N == 60
        assert configuration.eta.sum() == 60
        assert configuration.maximum <= 10


def test_tilted_rejection_sample_empty(stretched, rng):
    configuration = tilted_rejection_sample(stretched, 5, 0, None, rng)

    assert configuration.eta.tolist() == [0, 0, 0, 0, 0]


def test_rejection_sampler_budget(uniform, rng):
    """S_4 = 9 is impossible with sites <= 2, so every trial is rejected."""
    sampler = TiltedRejectionSampler(tilt(uniform, 2, 0.0), 4, 9, max_trials=100)

    with pytest.raises(BudgetExceededError) as excinfo:
        sampler.draw(rng)
    assert excinfo.value.acceptance_rate == 0.0
    assert sampler.trials == 100


def test_rejection_sampler_tracks_acceptance(stretched, rng):
    sampler = TiltedRejectionSampler(solve_tilt(stretched, 8, 0.8), 20, 16)
    for _ in range(10):
        sampler.draw(rng)

    assert sampler.accepted == 10
    assert 0.0 < sampler.acceptance_rate <= 1.0


def test_tilted_max_cdf(stretched):
    L, N, alpha = 40, 40, 12
    values = [tilted_max_cdf(stretched, L, N, beta, alpha) for beta in (4, 8, 12)]

    assert 0.0 <= values[0] <= values[1] <= values[2]
    assert values[2] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        tilted_max_cdf(stretched, L, N, 13, alpha)


def test_tilt_increases_with_N(stretched):
    """At fixed L the solved tilt grows with N, capped or not."""
    L = 20
    below = [solve_tilt(stretched, None, N / L).s for N in range(2, int(stretched.rho_c * L), 3)]
    capped = [solve_tilt(stretched, 40, N / L).s for N in (4, 10, 20, 40, 80, 200)]

    assert np.all(np.diff(below) > 0.0)
    assert np.all(np.diff(capped) > 0.0)
