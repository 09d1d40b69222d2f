"""Tests for the Nagaev-type estimates and the power-law split."""

import math

import pytest

from zrcrit.asymptotics.nagaev import (
    a_of_t,
    alpha_root,
    asymptotic_params,
    cramer_series,
    cramer_truncation_order,
    doney_split,
    nagaev_estimate,
    x_of_t,
)
from zrcrit.asymptotics.scales import c_lambda
from zrcrit.errors import NoRootError, UnsupportedCramerError, ValidityWarning
from zrcrit.marginal import critical_stats, log_pmf
from zrcrit.models import EstimateCase, Family, ModelSpec


@pytest.mark.parametrize("lam, order", [(0.9, 0), (0.6, 0), (0.5, 1), (0.45, 1), (1.0 / 3.0, 2), (0.3, 2), (0.2, 4)])
def test_cramer_truncation_order(lam, order):
    """t = floor(1/lambda) - 1."""
    assert cramer_truncation_order(lam) == order


def test_cramer_series(stretched):
    assert cramer_series(stretched, 0) == []
    assert cramer_series(stretched, 1) == [pytest.approx(stretched.kappa3 / (6.0 * stretched.sigma2**3))]
    with pytest.raises(UnsupportedCramerError):
        cramer_series(stretched, 2)


def test_asymptotic_params(stretched):
    params = asymptotic_params(stretched)

    assert params.t_trunc == 0
    assert params.cramer == ()
    assert params.c_lambda == pytest.approx(c_lambda(0.6, 2.0))
    assert params.gamma == pytest.approx(5.0)
    assert params.delta == pytest.approx(0.1 * params.c_lambda)
    assert params.use_exact_tail


def test_asymptotic_params_small_lambda_needs_coefficients():
    """lambda <= 1/3 needs lambda_1, which is not computed."""
    marginal = critical_stats(ModelSpec(family=Family.EXPLICIT_STRETCHED_WEIGHTS, b=1.0, lam=0.3))

    with pytest.raises(UnsupportedCramerError):
        asymptotic_params(marginal)
    params = asymptotic_params(marginal, cramer=[0.1, 0.01, 0.001])
    assert params.cramer == (0.1, 0.01)


def test_asymptotic_params_reject_power_law(power_law):
    with pytest.raises(ValueError, match="stretched"):
        asymptotic_params(power_law)


def test_a_of_t_solves_defining_equation():
    """alpha (1 - alpha)^lambda = b / t^(1+lambda) on the small-alpha branch."""
    lam, b, t = 0.6, 2.0, 6.0
    a = a_of_t(lam, b, t)
    alpha = 1.0 - a

    assert 0.0 < alpha < 1.0 / (1.0 + lam)
    assert alpha * (1.0 - alpha) ** lam == pytest.approx(b / t ** (1.0 + lam))
    assert x_of_t(lam, b, t) == pytest.approx(t * alpha)
    # x_t is the smallest root of b = x (t - x)^lambda
    x = x_of_t(lam, b, t)
    assert x * (t - x) ** lam == pytest.approx(b)


def test_a_of_t_below_threshold():
    """Well below c_lambda the condensate equation has no root; a(c_lambda) = 2 lambda/(1+lambda)."""
    lam, b = 0.6, 2.0
    c = c_lambda(lam, b)

    with pytest.raises(NoRootError):
        a_of_t(lam, b, 0.5 * c)
    assert a_of_t(lam, b, c) == pytest.approx(2.0 * lam / (1.0 + lam), abs=1e-4)
    assert a_of_t(lam, b, 100.0 * c) > 0.99


def test_alpha_root_requires_positive_excess(stretched):
    params = asymptotic_params(stretched)

    with pytest.raises(NoRootError):
        alpha_root(params, 100, 0.0)


def test_alpha_root_near_limit(stretched):
    """At large t the finite-L root is close to the limit alpha."""
    params = asymptotic_params(stretched)
    L = 4096
    t = 3.0 * params.c_lambda
    k = t * (stretched.sigma2 * L) ** (1.0 / 1.6)

    alpha = alpha_root(params, L, k)
    assert alpha == pytest.approx(1.0 - a_of_t(0.6, 2.0, t), abs=0.05)


def test_nagaev_big_jump_case(stretched):
    """Far above every threshold the estimate is L p_k."""
    params = asymptotic_params(stretched)
    L = 64
    N = int(stretched.rho_c * L) + 200
    k = N - stretched.rho_c * L

    estimate = nagaev_estimate(params, L, N)

    assert estimate.case is EstimateCase.NAGAEV_3
    assert not estimate.ambiguous
    assert estimate.valid
    lp = log_pmf(stretched, N)
    lo, hi = int(math.floor(k)), int(math.floor(k)) + 1
    assert math.log(L) + lp[hi] <= estimate.log_p <= math.log(L) + lp[lo]


def test_nagaev_forced_case_is_flagged(stretched):
    params = asymptotic_params(stretched)
    L = 64
    N = int(stretched.rho_c * L) + 200

    estimate = nagaev_estimate(params, L, N, case=EstimateCase.NAGAEV_5)

    assert estimate.case is EstimateCase.NAGAEV_5
    assert estimate.ambiguous
    assert estimate.valid


def test_nagaev_boundary_case_adds_gaussian_shift(stretched):
    """The boundary case is the big-jump exponent plus b^2 sigma^2 L / (2 k^(2 lambda))."""
    params = asymptotic_params(stretched)
    L = 64
    N = int(stretched.rho_c * L) + 200
    k = N - stretched.rho_c * L

    big_jump = nagaev_estimate(params, L, N, case=EstimateCase.NAGAEV_3)
    boundary = nagaev_estimate(params, L, N, case=EstimateCase.NAGAEV_5)

    expected = 2.0**2 * stretched.sigma2 * L / (2.0 * k**1.2)
    assert params.gamma * (1.0 - 0.6) == pytest.approx(2.0)
    assert boundary.log_p - big_jump.log_p == pytest.approx(expected, rel=1e-12)


def test_nagaev_mixed_case_reports_components(stretched):
    params = asymptotic_params(stretched)
    L = 4096
    k = params.c_lambda * (stretched.sigma2 * L) ** (1.0 / 1.6)
    N = int(round(stretched.rho_c * L + k))

    estimate = nagaev_estimate(params, L, N)

    assert estimate.case is EstimateCase.NAGAEV_4
    assert "gaussian" in estimate.components
    assert estimate.log_p >= estimate.components["gaussian"]


def test_nagaev_requires_upside(stretched):
    params = asymptotic_params(stretched)

    with pytest.raises(ValueError, match="N > rho_c L"):
        nagaev_estimate(params, 100, 10)


def test_doney_split(power_law):
    """Gaussian plus L p_k, valid for z = k / sqrt(L) >= 1."""
    L = 400
    N = int(power_law.rho_c * L) + 200
    k = N - power_law.rho_c * L

    estimate = doney_split(power_law, L, N)

    assert estimate.valid
    assert estimate.log_p == pytest.approx(math.log(math.exp(estimate.components["gaussian"]) + math.exp(estimate.components["condensate"])))
    assert estimate.components["condensate"] == pytest.approx(math.log(L) + log_pmf(power_law, int(k))[int(k)])
    assert estimate.case is EstimateCase.DONEY_CONDENSATE


def test_doney_split_warns_outside_range(power_law):
    L = 10_000
    N = int(math.ceil(power_law.rho_c * L))

    with pytest.warns(ValidityWarning):
        estimate = doney_split(power_law, L, N)
    assert not estimate.valid


def test_doney_split_rejects_stretched(stretched):
    with pytest.raises(ValueError, match="power_law_rates"):
        doney_split(stretched, 100, 200)
