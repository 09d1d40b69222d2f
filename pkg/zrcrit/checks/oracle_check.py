"""Normalization of the exact law of S_L and agreement of doubling with direct convolution."""

import numpy as np

from ..marginal import log_pmf
from ..oracle import default_n_max, log_convolve, power_tables, sum_distribution
from .base import Check, CheckContext, CheckResult
from .reference import STRETCHED_MODEL, marginal_for

MASS_TOL = 1e-9
LOG_TOL = 1e-12


def log_gap(a: np.ndarray, b: np.ndarray) -> float:
    """Largest |a - b| / max(1, |b|) over entries that are not -inf on both sides.

    A value that is -inf on one side only counts as an infinite gap.
    """
    both_empty = np.isneginf(a) & np.isneginf(b)
    if both_empty.all():
        return 0.0
    a, b = a[~both_empty], b[~both_empty]
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        return float("inf")
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))


def direct_power(log_p: np.ndarray, L: int, n_max: int) -> np.ndarray:
    """L-fold convolution one factor at a time."""
    result = log_p[: n_max + 1].copy()
    for _ in range(L - 1):
        result = log_convolve(result, log_p, n_max)
    return result


class OracleSoundnessCheck(Check):
    name = "oracle"
    criterion = 2
    description = "sum_N P[S_L=N] = 1 and doubling agrees with direct convolution over the full support"

    def run(self, context: CheckContext) -> CheckResult:
        marginal = marginal_for(STRETCHED_MODEL)
        sizes = context.pick([16, 64], [16, 64, 256])
        direct_sizes = context.pick([16], [16, 64])

        masses = {}
        for L in sizes:
            law = sum_distribution(marginal, L, budget=context.budget)
            masses[L] = law.total_mass()
        mass_error = max(abs(mass - 1.0) for mass in masses.values())

        gaps = {}
        for L in direct_sizes:
            n_max = default_n_max(marginal, L)
            log_p = log_pmf(marginal, n_max)
            doubled = power_tables(log_p, L, n_max, context.budget)[L]
            direct = direct_power(log_p, L, n_max)
            gaps[L] = log_gap(doubled, direct)
        gap = max(gaps.values())

        passed = mass_error <= MASS_TOL and gap <= LOG_TOL
        return self._result(
            passed,
            f"max |mass - 1| = {mass_error:.2e}, max log gap = {gap:.2e}",
            masses={str(L): m for L, m in masses.items()},
            log_gaps={str(L): g for L, g in gaps.items()},
        )
