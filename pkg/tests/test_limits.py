"""Tests for limit laws, norming sequences and p_gamma."""

import math

import numpy as np
import pytest

from zrcrit.asymptotics.limits import (
    downside_mixture_cdf,
    downside_pl_normings,
    downside_se_normings,
    frechet_cdf,
    frechet_scale,
    gaussian_cdf,
    gaussian_variance_correction,
    gumbel_cdf,
    gumbel_normings,
    p_gamma_powerlaw,
    p_gamma_stretched,
)
from zrcrit.asymptotics.scales import NRule, resolve_N
from zrcrit.errors import NonPositiveError
from zrcrit.marginal import tail_interpolator


def test_frechet_cdf_shape():
    x = np.array([-1.0, 0.0, 0.5, 2.0, 100.0])
    values = frechet_cdf(x, A=96.0, b=5.0)

    assert values[0] == 0.0
    assert values[1] == 0.0
    assert np.all(np.diff(values) >= 0.0)
    assert values[-1] == pytest.approx(1.0, abs=1e-6)
    assert values[3] == pytest.approx(math.exp(-96.0 * 2.0**-4 / 4.0))


def test_gumbel_and_gaussian_cdf():
    assert gumbel_cdf(0.0) == pytest.approx(math.exp(-1.0))
    assert gaussian_cdf(0.0) == pytest.approx(0.5)
    assert gaussian_cdf(2.0, variance=4.0) == pytest.approx(gaussian_cdf(1.0))


def test_downside_mixture_reduces_to_frechet():
    """omega = 0 recovers the Frechet law; omega > 0 removes tail mass."""
    x = 1.5
    frechet = float(frechet_cdf(x, A=96.0, b=5.0))

    assert downside_mixture_cdf(x, 0.0, A=96.0, b=5.0) == pytest.approx(frechet)
    assert downside_mixture_cdf(x, 1.0, A=96.0, b=5.0) > frechet
    assert downside_mixture_cdf(np.array([0.0, x]), 1.0, A=96.0, b=5.0)[0] == 0.0


def test_downside_mixture_rejects_negative_omega():
    with pytest.raises(ValueError, match="non-negative"):
        downside_mixture_cdf(1.0, -0.5, A=1.0, b=5.0)


def test_frechet_scale():
    assert frechet_scale(1024, 5.0) == pytest.approx(1024**0.25)


def test_gumbel_normings_solve_tail_equation(stretched):
    """L P[eta > y_L] = 1 and b_L = y_L^lambda / b."""
    L = 1000
    y, b_L = gumbel_normings(stretched, L)
    log_tail = tail_interpolator(stretched, int(4 * y) + 64)

    assert y > 0.0
    assert L * math.exp(log_tail(y)) == pytest.approx(1.0, rel=1e-6)
    assert b_L == pytest.approx(y**0.6 / 2.0)


def test_gumbel_normings_reject_power_law(power_law):
    with pytest.raises(ValueError, match="stretched"):
        gumbel_normings(power_law, 100)


def test_downside_pl_normings(power_law):
    L = 10_000
    N = resolve_N(NRule(kind="omega", value=1.0), power_law, L).N
    B_L, s_L = downside_pl_normings(power_law, L, N)

    assert B_L > 0.0
    assert s_L > 0.0
    # defining equation (s B)^b e^(s B) = A L s^(b-1)
    u = s_L * B_L
    assert 5.0 * math.log(u) + u == pytest.approx(math.log(power_law.A_tail * L * s_L**4.0), rel=1e-9)


def test_downside_pl_normings_need_downside(power_law):
    """No downside tilt exists above rho_c L."""
    L = 1000
    with pytest.raises(ValueError):
        downside_pl_normings(power_law, L, int(power_law.rho_c * L) + 1)


def test_downside_se_normings(stretched):
    L = 10_000
    N = resolve_N(NRule(kind="omega", value=2.0), stretched, L).N
    gamma_L, zeta_L = downside_se_normings(stretched, L, N)

    assert gamma_L > 0.0
    assert zeta_L > 0.0


def test_p_gamma_powerlaw_is_increasing(power_law):
    values = [p_gamma_powerlaw(power_law, gamma) for gamma in (-5.0, 0.0, 5.0)]

    assert all(0.0 < v < 1.0 for v in values)
    assert values[0] < values[1] < values[2]


def test_p_gamma_stretched_is_decreasing(stretched):
    values = [p_gamma_stretched(stretched, gamma) for gamma in (-5.0, 0.0, 5.0)]

    assert all(0.0 < v < 1.0 for v in values)
    assert values[0] > values[1] > values[2]
    assert p_gamma_stretched(stretched, 0.0, prefactor=2.0 * stretched.A_tail) > values[1]


def test_p_gamma_wrong_family(stretched, power_law):
    with pytest.raises(ValueError):
        p_gamma_powerlaw(stretched, 0.0)
    with pytest.raises(ValueError):
        p_gamma_stretched(power_law, 0.0)


def test_gaussian_variance_correction():
    """sigma^2 at a = 1, growing as a falls towards lambda/(1+lambda)."""
    assert gaussian_variance_correction(2.5, 0.6, 1.0) == pytest.approx(2.5)
    assert gaussian_variance_correction(2.5, 0.6, 0.7) > 2.5

    with pytest.raises(NonPositiveError):
        gaussian_variance_correction(2.5, 0.6, 0.375)
    with pytest.raises(ValueError):
        gaussian_variance_correction(2.5, 0.6, 1.5)
