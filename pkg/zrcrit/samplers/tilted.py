"""Exponentially tilted, truncated single-site laws and rejection sampling on S_L = N."""

import logging
import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import optimize, special

from ..errors import BudgetExceededError, UnreachableError
from ..marginal import Marginal, log_pmf
from ..models import Configuration

logger = logging.getLogger(__name__)

# Bracket search
MAX_ABS_TILT = 700.0


class TiltedMarginal(BaseModel):
    """P_alpha(s)[eta = k] = e^(s k) p_k 1{k <= alpha} / Z_alpha(s)."""

    base: Marginal
    cap: Optional[int] = Field(default=None, description="Per-site cap alpha (None = uncapped)")
    s: float
    log_Z: float
    rho: float
    sigma2: float
    log_q: np.ndarray

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @property
    def Z(self) -> float:
        return math.exp(self.log_Z)

    @property
    def q(self) -> np.ndarray:
        return np.exp(self.log_q)


def tilt(marginal: Marginal, cap: Optional[int], s: float) -> TiltedMarginal:
    """Tilted law at cap alpha and tilt s.

    Raises:
        UnreachableError: If the law is uncapped and s > 0
    """
    if cap is not None and cap < 0:
        raise ValueError(f"cap must be non-negative, got {cap}")
    if cap is None and s > 0.0:
        raise UnreachableError("an uncapped heavy-tailed law cannot be tilted with s > 0")
    top = marginal.K if cap is None else cap
    n = np.arange(top + 1, dtype=float)
    terms = log_pmf(marginal, top) + s * n
    log_Z = float(special.logsumexp(terms))
    log_q = terms - log_Z
    q = np.exp(log_q)
    if cap is None and s == 0.0:
        return TiltedMarginal(base=marginal, cap=None, s=0.0, log_Z=0.0, rho=marginal.rho_c, sigma2=marginal.sigma2, log_q=log_q)
    rho = float(np.dot(n, q))
    sigma2 = float(np.dot((n - rho) ** 2, q))
    return TiltedMarginal(base=marginal, cap=cap, s=s, log_Z=log_Z, rho=rho, sigma2=sigma2, log_q=log_q)


def solve_tilt(marginal: Marginal, cap: Optional[int], target: float) -> TiltedMarginal:
    """Tilt s_* with rho_alpha(s_*) = target, by bisection inside an expanding bracket.

    Raises:
        UnreachableError: If target is not strictly inside the attainable range of means
    """
    if target <= 0.0:
        raise UnreachableError(f"target mean {target} is not positive")
    if cap is None:
        if target > marginal.rho_c * (1.0 + 1e-12):
            raise UnreachableError(f"target mean {target} exceeds rho_c={marginal.rho_c} without a cap")
        if target >= marginal.rho_c * (1.0 - 1e-13):
            return tilt(marginal, None, 0.0)
    elif target >= (cap if marginal.spec is not None else min(cap, marginal.K)):
        raise UnreachableError(f"target mean {target} is not below the cap {cap}")

    def residual(s: float) -> float:
        return tilt(marginal, cap, s).rho - target

    lo, hi = -1.0, 0.0 if cap is None else 1.0
    while residual(lo) > 0.0:
        lo *= 2.0
        if lo < -MAX_ABS_TILT:
            raise UnreachableError(f"no tilt reaches target mean {target}")
    while cap is not None and residual(hi) < 0.0:
        hi *= 2.0
        if hi > MAX_ABS_TILT:
            raise UnreachableError(f"no tilt reaches target mean {target}")
    logger.debug(f"Tilt bracket [{lo}, {hi}] for target {target}")
    s_star = optimize.bisect(residual, lo, hi, xtol=1e-14, maxiter=500)
    return tilt(marginal, cap, float(s_star))


def tilted_max_cdf(marginal: Marginal, L: int, N: int, beta: int, alpha: Optional[int]) -> float:
    """(Z_beta(s_*) / Z_alpha(s_*))^L, the tilted-measure approximation of P[M_L <= beta | S_L = N]."""
    if alpha is not None and beta > alpha:
        raise ValueError(f"beta={beta} must not exceed alpha={alpha}")
    s_star = solve_tilt(marginal, alpha, N / L).s
    log_ratio = tilt(marginal, beta, s_star).log_Z - tilt(marginal, alpha, s_star).log_Z
    return math.exp(L * log_ratio)


class TiltedRejectionSampler:
    """Draws L i.i.d. sites from a tilted law until their sum equals N.

    Accepted configurations follow the canonical law conditioned on M_L <= cap.
    """

    DEFAULT_BATCH = 256
    MAX_BATCH_SITES = 1 << 22
    DEFAULT_MAX_TRIALS = 1_000_000

    def __init__(
        self,
        tilted: TiltedMarginal,
        L: int,
        N: int,
        max_trials: int = DEFAULT_MAX_TRIALS,
        batch: int = DEFAULT_BATCH,
    ):
        if L < 1:
            raise ValueError(f"L must be at least 1, got {L}")
        self.tilted = tilted
        self.L = L
        self.N = N
        self.max_trials = max_trials
        self.batch = max(1, min(batch, self.MAX_BATCH_SITES // L))
        self._cdf = np.cumsum(tilted.q)
        self._cdf[-1] = 1.0
        self.trials = 0
        self.accepted = 0

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.trials if self.trials else 0.0

    def draw_eta(self, rng: np.random.Generator) -> np.ndarray:
        """One accepted occupation vector.

        Raises:
            BudgetExceededError: If max_trials proposals are rejected
        """
        spent = 0
        while spent < self.max_trials:
            rows = min(self.batch, self.max_trials - spent)
            sites = np.searchsorted(self._cdf, rng.random((rows, self.L)), side="right")
            hits = np.flatnonzero(sites.sum(axis=1) == self.N)
            if hits.size:
                used = int(hits[0]) + 1
                self.trials += used
                self.accepted += 1
                return sites[hits[0]].astype(np.int64)
            spent += rows
            self.trials += rows
        raise BudgetExceededError(
            f"no proposal hit S_L={self.N} in {self.max_trials} trials (acceptance rate {self.acceptance_rate:.3g})",
            acceptance_rate=self.acceptance_rate,
        )

    def draw(self, rng: np.random.Generator) -> Configuration:
        return Configuration(eta=self.draw_eta(rng), N=self.N)


def tilted_rejection_sample(
    marginal: Marginal,
    L: int,
    N: int,
    cap: Optional[int],
    rng: np.random.Generator,
    max_trials: int = TiltedRejectionSampler.DEFAULT_MAX_TRIALS,
) -> Configuration:
    """Canonical configuration conditioned on M_L <= cap, by tilted rejection."""
    if N == 0:
        return Configuration(eta=np.zeros(L, dtype=np.int64), N=0)
    tilted = solve_tilt(marginal, cap, N / L)
    return TiltedRejectionSampler(tilted, L, N, max_trials=max_trials).draw(rng)
