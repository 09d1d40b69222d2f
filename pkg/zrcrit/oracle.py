"""Exact finite-L laws of S_L and of M_L under the canonical measure.

Distributions are L-fold convolution powers of the single-site law, computed by
binary power doubling with direct log-domain convolution. Transform methods are
avoided: they lose relative accuracy in the far tail.
"""

import logging
import math
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .errors import BudgetExceededError, ImpossibleNError
from .marginal import Marginal, log_pmf

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 1e10


class ExactLaw(BaseModel):
    """log P[S_L = n, all sites <= cap] for n = 0..n_max."""

    L: int = Field(..., ge=1)
    n_max: int = Field(..., ge=0)
    cap: Optional[int] = Field(default=None, description="Per-site cap (None = uncapped)")
    log_pS: np.ndarray

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    def log_p(self, n: int) -> float:
        if n < 0 or n > self.n_max:
            raise ValueError(f"n={n} is outside the retained support 0..{self.n_max}")
        return float(self.log_pS[n])

    def total_mass(self) -> float:
        return float(np.exp(_log_sum(self.log_pS)))

    def to_rows(self) -> list[tuple[int, float]]:
        """(n, log_p) rows for CSV export."""
        return [(n, float(v)) for n, v in enumerate(self.log_pS)]


def _log_sum(values: np.ndarray) -> float:
    top = float(np.max(values)) if values.size else -math.inf
    if top == -math.inf:
        return -math.inf
    return top + math.log(float(np.sum(np.exp(values - top))))


def _trim(log_v: np.ndarray, n_max: int) -> np.ndarray:
    head = log_v[: n_max + 1]
    finite = np.flatnonzero(np.isfinite(head))
    if finite.size == 0:
        return head[:0]
    return head[: finite[-1] + 1]


def log_convolve(log_a: np.ndarray, log_b: np.ndarray, n_max: int) -> np.ndarray:
    """Log of the convolution of two log-probability vectors, truncated to 0..n_max."""
    a = _trim(log_a, n_max)
    b = _trim(log_b, n_max)
    out = np.full(n_max + 1, -np.inf)
    if a.size == 0 or b.size == 0:
        return out
    b_rev = b[::-1]
    top = min(n_max, a.size + b.size - 2)
    for n in range(top + 1):
        lo = max(0, n - b.size + 1)
        hi = min(n, a.size - 1)
        start = b.size - 1 - n + lo
        out[n] = _log_sum(a[lo : hi + 1] + b_rev[start : start + hi - lo + 1])
    return out


def _identity(n_max: int) -> np.ndarray:
    unit = np.full(n_max + 1, -np.inf)
    unit[0] = 0.0
    return unit


def _check_budget(L: int, n_max: int, budget: float) -> None:
    work = float(n_max + 1) ** 2 * 2.0 * max(math.log2(L), 1.0)
    if work > budget:
        raise BudgetExceededError(
            f"exact convolution for L={L}, N_max={n_max} needs ~{work:.3g} operations, above the budget {budget:.3g}",
            work=work,
        )


def power_tables(log_p: np.ndarray, L: int, n_max: int, budget: float = DEFAULT_BUDGET) -> dict[int, np.ndarray]:
    """Block-sum laws for every block size the dyadic split of L visits.

    Holds the powers 2^j <= L and the partial sums L mod 2^(j+1), keyed by block size.
    Size 0 maps to the point mass at 0.
    """
    if L < 1:
        raise ValueError(f"L must be at least 1, got {L}")
    _check_budget(L, n_max, budget)
    tables: dict[int, np.ndarray] = {0: _identity(n_max)}
    power = np.array(log_p[: n_max + 1], dtype=float)
    if power.size < n_max + 1:
        power = np.concatenate([power, np.full(n_max + 1 - power.size, -np.inf)])
    accumulated: Optional[np.ndarray] = None
    size = 1
    while True:
        tables[size] = power
        if L & size:
            accumulated = power if accumulated is None else log_convolve(accumulated, power, n_max)
        tables[L % (2 * size)] = accumulated if accumulated is not None else tables[0]
        if 2 * size > L:
            break
        power = log_convolve(power, power, n_max)
        size *= 2
        logger.debug(f"Doubling level: block size {size}")
    return tables


def _power(log_p: np.ndarray, L: int, n_max: int, budget: float) -> np.ndarray:
    return power_tables(log_p, L, n_max, budget)[L]


def _site_law(marginal: Marginal, n_max: int, cap: Optional[int]) -> np.ndarray:
    base = np.array(log_pmf(marginal, n_max), dtype=float)
    if cap is not None and cap + 1 <= n_max:
        base[cap + 1 :] = -np.inf
    return base


def default_n_max(marginal: Marginal, L: int) -> int:
    """Retained support ceil(rho_c L + 12 sigma sqrt(L) + 4 Delta_L)."""
    if marginal.spec is None:
        return marginal.K * L
    from .asymptotics.scales import critical_scale

    return int(math.ceil(marginal.rho_c * L + 12.0 * marginal.sigma * math.sqrt(L) + 4.0 * critical_scale(marginal, L)))


def sum_distribution(
    marginal: Marginal,
    L: int,
    n_max: Optional[int] = None,
    cap: Optional[int] = None,
    budget: float = DEFAULT_BUDGET,
) -> ExactLaw:
    """Exact law of S_L, optionally jointly with the event {all sites <= cap}.

    Args:
        marginal: Single-site law
        L: Number of sites
        n_max: Largest retained total (defaults to default_n_max)
        cap: Optional per-site cap m
        budget: Operation budget for the convolutions

    Returns:
        ExactLaw

    Raises:
        BudgetExceededError: If N_max^2 log L exceeds the budget
    """
    if n_max is None:
        n_max = default_n_max(marginal, L)
    if cap is not None and cap < 0:
        raise ValueError(f"cap must be non-negative, got {cap}")
    log_pS = _power(_site_law(marginal, n_max, cap), L, n_max, budget)
    return ExactLaw(L=L, n_max=n_max, cap=cap, log_pS=log_pS)


def exact_pSLN(marginal: Marginal, L: int, N: int, budget: float = DEFAULT_BUDGET) -> float:
    """log P[S_L = N]."""
    if N < 0:
        raise ValueError(f"N must be non-negative, got {N}")
    return sum_distribution(marginal, L, n_max=N, budget=budget).log_p(N)


def _require_possible(log_denominator: float, L: int, N: int) -> None:
    if not math.isfinite(log_denominator) or log_denominator < -740.0:
        raise ImpossibleNError(f"P[S_L=N] vanishes at machine scale for L={L}, N={N}")


def conditional_max_cdf(
    marginal: Marginal,
    L: int,
    N: int,
    m_grid: Sequence[int],
    budget: float = DEFAULT_BUDGET,
) -> np.ndarray:
    """P[M_L <= m | S_L = N] for every m in m_grid.

    Raises:
        ImpossibleNError: If P[S_L = N] is zero at machine scale
    """
    log_denominator = exact_pSLN(marginal, L, N, budget)
    _require_possible(log_denominator, L, N)
    values = np.empty(len(m_grid))
    base = _site_law(marginal, N, None)
    for i, m in enumerate(m_grid):
        if m >= N:
            values[i] = 1.0
        elif m < 0 or m * L < N:
            values[i] = 0.0
        else:
            capped = base.copy()
            capped[m + 1 :] = -np.inf
            log_joint = _power(capped, L, N, budget)[N]
            values[i] = math.exp(log_joint - log_denominator)
    return np.clip(values, 0.0, 1.0)


def conditional_site_marginal(
    marginal: Marginal,
    L: int,
    N: int,
    site: int = 0,
    budget: float = DEFAULT_BUDGET,
) -> np.ndarray:
    """P[eta_site = j | S_L = N] for j = 0..N.

    The remaining L - 1 sites are assembled as the block left of the site
    convolved with the block right of it, so different sites take different
    computation paths.
    """
    if not 0 <= site < L:
        raise ValueError(f"site must lie in 0..{L - 1}, got {site}")
    base = _site_law(marginal, N, None)
    left = _power(base, site, N, budget) if site > 0 else _identity(N)
    right = _power(base, L - 1 - site, N, budget) if site < L - 1 else _identity(N)
    rest = log_convolve(left, right, N)
    log_joint = base + rest[::-1]
    log_denominator = _log_sum(log_joint)
    _require_possible(log_denominator, L, N)
    return np.exp(log_joint - log_denominator)


def oracle_condensed_probability(
    marginal: Marginal,
    L: int,
    N: int,
    threshold: float,
    budget: float = DEFAULT_BUDGET,
) -> float:
    """P[M_L > threshold | S_L = N]."""
    cdf = conditional_max_cdf(marginal, L, N, [int(math.floor(threshold))], budget)
    return float(1.0 - cdf[0])
