"""Tests for critical scales, scale coordinates and N-rules."""

import math

import pytest

from zrcrit.asymptotics.scales import (
    NRule,
    c_lambda,
    critical_scale,
    dense_condensate_fraction,
    omega_power_law,
    omega_stretched,
    power_law_gamma,
    resolve_N,
    stretched_unit,
    subleading_gamma,
    t_coordinate,
)


def test_c_lambda_reference_value():
    """c_lambda for b = 2, lambda = 0.6."""
    assert c_lambda(0.6, 2.0) == pytest.approx(4.09, abs=0.01)


def test_c_lambda_rejects_invalid_parameters():
    with pytest.raises(ValueError):
        c_lambda(1.0, 2.0)
    with pytest.raises(ValueError):
        c_lambda(0.5, -1.0)


def test_critical_scale_power_law(power_law):
    """Delta_L = sigma sqrt((b-3) L log L)."""
    L = 1000
    expected = power_law.sigma * math.sqrt(2.0 * L * math.log(L))

    assert critical_scale(power_law, L) == pytest.approx(expected)
    with pytest.raises(ValueError):
        critical_scale(power_law, 1)


def test_critical_scale_stretched(stretched):
    L = 1024
    assert critical_scale(stretched, L) == pytest.approx(c_lambda(0.6, 2.0) * (stretched.sigma2 * L) ** (1.0 / 1.6))


def test_fixed_rule_passes_N_through(stretched):
    resolution = resolve_N(NRule(kind="fixed", value=137), stretched, 100)

    assert resolution.N == 137
    assert resolution.real_value == 137
    assert resolution.parameter is None


def test_fixed_rule_requires_integer(stretched):
    with pytest.raises(ValueError, match="integer"):
        resolve_N(NRule(kind="fixed", value=10.5), stretched, 100)


def test_subleading_rule_reference_value(stretched):
    """N(subl, gamma = 0, L = 1024) for g(n) = 1 + 2/n^0.6."""
    resolution = resolve_N(NRule(kind="subl", value=0.0), stretched, 1024)

    assert resolution.N == pytest.approx(1356, abs=1)
    assert abs(resolution.real_value - resolution.N) <= 0.5


def test_density_rule(stretched):
    assert resolve_N(NRule(kind="density", value=0.5), stretched, 100).N == 50


def test_rules_reject_wrong_family(stretched, power_law):
    with pytest.raises(ValueError, match="power_law_rates"):
        resolve_N(NRule(kind="gammal1", value=0.0), stretched, 100)
    with pytest.raises(ValueError, match="stretched"):
        resolve_N(NRule(kind="t", value=1.0), power_law, 100)
    with pytest.raises(ValueError, match="lambda > 1/2"):
        resolve_N(NRule(kind="subl", value=0.0), power_law, 100)


def test_rule_with_negative_N_is_rejected(stretched):
    with pytest.raises(ValueError, match="negative"):
        resolve_N(NRule(kind="density", value=-1.0), stretched, 10)


def test_t_coordinate_inverts_t_rule(stretched):
    """Rounding N moves t_L by at most half a unit of (sigma^2 L)^(-1/(1+lambda))."""
    L = 4096
    resolution = resolve_N(NRule(kind="t", value=5.0), stretched, L)

    assert t_coordinate(stretched, L, resolution.N) == pytest.approx(5.0, abs=0.5 / stretched_unit(stretched, L))


def test_subleading_gamma_inverts_subl_rule(stretched):
    L = 4096
    resolution = resolve_N(NRule(kind="subl", value=2.0), stretched, L)
    gamma = subleading_gamma(stretched, L, resolution.N)

    # one particle shifts gamma by the inverse sub-leading unit, well below 0.1 here
    assert gamma == pytest.approx(2.0, abs=0.1)


def test_power_law_gamma_inverts_gammal1_rule(power_law):
    L = 10_000
    resolution = resolve_N(NRule(kind="gammal1", value=-1.5), power_law, L)
    gamma = power_law_gamma(power_law, L, resolution.N)

    assert gamma == pytest.approx(-1.5, abs=math.log(L) / critical_scale(power_law, L))


def test_omega_rules_round_trip(stretched, power_law):
    L = 100_000
    n_se = resolve_N(NRule(kind="omega", value=0.5), stretched, L)
    n_pl = resolve_N(NRule(kind="omega", value=0.5), power_law, L)

    assert n_se.N < stretched.rho_c * L
    assert n_pl.N < power_law.rho_c * L
    assert omega_stretched(stretched, L, n_se.N) == pytest.approx(0.5, rel=0.05)
    assert omega_power_law(power_law, L, n_pl.N) == pytest.approx(0.5, rel=0.05)


def test_dense_condensate_fraction(stretched):
    assert dense_condensate_fraction(stretched, 0.5) == 0.0
    assert dense_condensate_fraction(stretched, 2.0) == pytest.approx(2.0 - stretched.rho_c)
