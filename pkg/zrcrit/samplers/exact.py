"""Exact sampling from the canonical measure by splitting block sums down a binary tree."""

import logging
import math
from typing import Optional

import numpy as np

from ..errors import BudgetExceededError, ImpossibleNError, UnreachableError
from ..marginal import Marginal, log_pmf
from ..models import Configuration
from ..oracle import DEFAULT_BUDGET, power_tables
from .tilted import TiltedRejectionSampler, solve_tilt

logger = logging.getLogger(__name__)


def _high_bit(size: int) -> int:
    return 1 << (size.bit_length() - 1)


class ExactSampler:
    """Draws configurations with the exact law of mu_{L,N}.

    A block of s sites holding n particles is split into blocks of sizes s1 and
    s - s1 (halves for powers of two, otherwise the high bit and the rest); the
    left count m is drawn with weight P[S_s1 = m] P[S_(s-s1) = n - m] from the
    precomputed block tables.

    With block_size set, dyadic blocks of that size holding no more than their
    typical mass are filled by tilted rejection instead, falling back to the
    tree when rejection stalls.
    """

    REJECTION_TRIALS = 2000

    def __init__(
        self,
        marginal: Marginal,
        L: int,
        N: int,
        block_size: Optional[int] = None,
        budget: float = DEFAULT_BUDGET,
    ):
        if L < 1:
            raise ValueError(f"L must be at least 1, got {L}")
        if N < 0:
            raise ValueError(f"N must be non-negative, got {N}")
        if block_size is not None and (block_size < 2 or block_size & (block_size - 1)):
            raise ValueError(f"block_size must be a power of two >= 2, got {block_size}")
        self.marginal = marginal
        self.L = L
        self.N = N
        self.block_size = block_size
        self.tables = power_tables(log_pmf(marginal, N), L, N, budget)
        self.log_pSLN = float(self.tables[L][N])
        if not math.isfinite(self.log_pSLN) or self.log_pSLN < -740.0:
            raise ImpossibleNError(f"P[S_L=N] vanishes at machine scale for L={L}, N={N}")
        self._rejectors: dict[int, Optional[TiltedRejectionSampler]] = {}
        if block_size is not None:
            self._rejection_limit = block_size * marginal.rho_c + 4.0 * marginal.sigma * math.sqrt(block_size)
        logger.debug(f"Exact sampler ready for L={L}, N={N}, log P[S_L=N]={self.log_pSLN:.6g}")

    def _split(self, size: int, n: int, rng: np.random.Generator) -> tuple[int, int, int]:
        left = size // 2 if size & (size - 1) == 0 else _high_bit(size)
        right = size - left
        weights = self.tables[left][: n + 1] + self.tables[right][n::-1]
        weights = np.exp(weights - np.max(weights))
        cdf = np.cumsum(weights)
        m = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
        return left, right, min(m, n)

    def _rejector(self, n: int) -> Optional[TiltedRejectionSampler]:
        if n not in self._rejectors:
            try:
                tilted = solve_tilt(self.marginal, n, n / self.block_size)
                self._rejectors[n] = TiltedRejectionSampler(tilted, self.block_size, n, max_trials=self.REJECTION_TRIALS)
            except UnreachableError:
                self._rejectors[n] = None
        return self._rejectors[n]

    def _fill_block(self, eta: np.ndarray, offset: int, n: int, rng: np.random.Generator) -> bool:
        if n == 0 or n > self._rejection_limit:
            return False
        rejector = self._rejector(n)
        if rejector is None:
            return False
        try:
            eta[offset : offset + self.block_size] = rejector.draw_eta(rng)
        except BudgetExceededError:
            logger.debug(f"Rejection stalled for a block holding {n}; splitting instead")
            return False
        return True

    def draw_eta(self, rng: np.random.Generator) -> np.ndarray:
        eta = np.zeros(self.L, dtype=np.int64)
        stack = [(0, self.L, self.N)]
        while stack:
            offset, size, n = stack.pop()
            if n == 0:
                continue
            if size == 1:
                eta[offset] = n
                continue
            if size == self.block_size and self._fill_block(eta, offset, n, rng):
                continue
            left, _, m = self._split(size, n, rng)
            stack.append((offset, left, m))
            stack.append((offset + left, size - left, n - m))
        return eta

    def draw(self, rng: np.random.Generator) -> Configuration:
        return Configuration(eta=self.draw_eta(rng), N=self.N)


def exact_conditional_sample(marginal: Marginal, L: int, N: int, rng: np.random.Generator) -> Configuration:
    """One configuration from mu_{L,N}.

    Raises:
        ImpossibleNError: If P[S_L = N] is zero at machine scale
    """
    return ExactSampler(marginal, L, N).draw(rng)
