"""Tests for the acceptance checks."""

import numpy as np
import pytest

from zrcrit.asymptotics.scales import NRule, c_lambda, resolve_N
from zrcrit.checks import CheckEngine, ConstantsCheck, OracleSoundnessCheck
from zrcrit.checks.base import CheckContext, CheckStatus
from zrcrit.checks.bulk_checks import drift_centers
from zrcrit.checks.oracle_check import LOG_TOL, direct_power, log_gap
from zrcrit.marginal import log_pmf
from zrcrit.oracle import power_tables


def test_constants_check_passes():
    result = ConstantsCheck().run(CheckContext())

    assert result.status is CheckStatus.PASSED, result.message
    assert result.criterion == 1
    assert result.metrics["N_crit"] == pytest.approx(1356, abs=1)


def test_oracle_check_quick():
    result = OracleSoundnessCheck().run(CheckContext(profile="quick"))

    assert result.passed, result.message
    assert set(result.metrics["masses"]) == {"16", "64"}


def test_log_gap_ignores_only_shared_empty_entries():
    a = np.array([0.0, -700.0, -np.inf])

    assert log_gap(a, a.copy()) == 0.0
    assert log_gap(a, np.array([0.0, -700.0 * (1.0 + 1e-14), -np.inf])) <= LOG_TOL
    assert log_gap(a, np.array([0.0, -np.inf, -np.inf])) == float("inf")
    assert log_gap(np.array([-1.0, -5.5]), np.array([-1.0, -5.0])) == pytest.approx(0.1)


def test_doubling_matches_direct_convolution_in_the_far_tail(stretched):
    """The comparison covers entries far below e^-50."""
    n_max = 600
    log_p = log_pmf(stretched, n_max)

    doubled = power_tables(log_p, 4, n_max)[4]
    direct = direct_power(log_p, 4, n_max)

    assert direct[np.isfinite(direct)].min() < -50.0
    assert log_gap(doubled, direct) <= LOG_TOL


def test_drift_centers_report_finite_size_and_limit_fractions(stretched):
    """The drift check centres on a_L and reports the t-limit a(t) beside it."""
    L = 1024
    t = 2.0 * c_lambda(0.6, 2.0)
    N = resolve_N(NRule(kind="t", value=t), stretched, L).N

    a_L, a_t = drift_centers(stretched, L, N, t)

    assert a_t == pytest.approx(0.927, abs=0.005)
    assert 0.375 < a_L < 1.0


@pytest.mark.slow
@pytest.mark.parametrize("name", [check.name for check in CheckEngine.with_default_checks().get_checks()])
def test_quick_profile_passes(name):
    """Every acceptance check passes at quick sizes with seed 0."""
    report = CheckEngine.with_default_checks().run_all(CheckContext(profile="quick", seed=0), only=[name])

    result = report.results[0]
    assert result.status is CheckStatus.PASSED, f"{name}: {result.message}"
