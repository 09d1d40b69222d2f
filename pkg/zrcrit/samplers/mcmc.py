"""Particle-conserving Metropolis chains targeting the canonical measure."""

import logging
from typing import Iterator, Optional

import numpy as np

from ..marginal import Marginal, log_pmf
from ..models import Configuration

logger = logging.getLogger(__name__)


def log_acceptance(log_w: np.ndarray, eta: np.ndarray, x: int, y: int) -> float:
    """log of w(eta_x - 1) w(eta_y + 1) / (w(eta_x) w(eta_y)) for moving one particle x -> y."""
    nx, ny = int(eta[x]), int(eta[y])
    if nx == 0:
        return -np.inf
    return float(log_w[nx - 1] + log_w[ny + 1] - log_w[nx] - log_w[ny])


def initial_configuration(L: int, N: int) -> np.ndarray:
    """Flat start: N // L everywhere, the remainder on the first sites."""
    eta = np.full(L, N // L, dtype=np.int64)
    eta[: N % L] += 1
    return eta


class MetropolisSampler:
    """Runs independent chains in lockstep, one proposed move per chain per step.

    A move picks an ordered pair of distinct sites (x, y) uniformly and moves a
    particle x -> y with probability min(1, w(eta_x-1) w(eta_y+1) / (w(eta_x) w(eta_y))).
    Defaults: burn-in 100 L N moves, thinning L moves.
    """

    def __init__(
        self,
        marginal: Marginal,
        L: int,
        N: int,
        chains: int = 1,
        burn_in: Optional[int] = None,
        thin: Optional[int] = None,
    ):
        if L < 1 or N < 0:
            raise ValueError(f"need L >= 1 and N >= 0, got L={L}, N={N}")
        if chains < 1:
            raise ValueError(f"chains must be at least 1, got {chains}")
        self.L = L
        self.N = N
        self.chains = chains
        self.burn_in = 100 * L * N if burn_in is None else burn_in
        self.thin = L if thin is None else thin
        # log weights up to N + 1: the receiving site may reach N
        self.log_w = np.array(log_pmf(marginal, N + 1), dtype=float)
        self.eta = np.tile(initial_configuration(L, N), (chains, 1))
        self.moves = 0
        self.accepted = 0
        self._burned = False

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / (self.moves * self.chains) if self.moves else 0.0

    def step(self, rng: np.random.Generator, moves: int = 1) -> None:
        if self.L == 1:
            self.moves += moves
            return
        rows = np.arange(self.chains)
        for _ in range(moves):
            x = rng.integers(self.L, size=self.chains)
            y = rng.integers(self.L - 1, size=self.chains)
            y += y >= x
            nx = self.eta[rows, x]
            ny = self.eta[rows, y]
            occupied = nx > 0
            source = np.where(occupied, nx - 1, 0)
            log_a = self.log_w[source] + self.log_w[ny + 1] - self.log_w[nx] - self.log_w[ny]
            accept = occupied & (np.log(rng.random(self.chains)) < log_a)
            self.eta[rows, x] -= accept
            self.eta[rows, y] += accept
            self.accepted += int(accept.sum())
        self.moves += moves

    def burn(self, rng: np.random.Generator) -> None:
        if not self._burned:
            logger.debug(f"Burning in {self.chains} chains for {self.burn_in} moves")
            self.step(rng, self.burn_in)
            self._burned = True

    def sample(self, rng: np.random.Generator, draws: int) -> np.ndarray:
        """draws x chains configurations, shape (draws * chains, L), chain-major within each draw."""
        self.burn(rng)
        out = np.empty((draws, self.chains, self.L), dtype=np.int64)
        for i in range(draws):
            self.step(rng, self.thin)
            out[i] = self.eta
        return out.reshape(draws * self.chains, self.L)


def mcmc_conditional_sample(
    marginal: Marginal,
    L: int,
    N: int,
    steps: int,
    rng: np.random.Generator,
    burn_in: Optional[int] = None,
    thin: Optional[int] = None,
) -> Iterator[Configuration]:
    """Yield `steps` thinned configurations of one chain after burn-in."""
    if steps < 1:
        raise ValueError(f"steps must be at least 1, got {steps}")
    sampler = MetropolisSampler(marginal, L, N, chains=1, burn_in=burn_in, thin=thin)
    sampler.burn(rng)
    for _ in range(steps):
        sampler.step(rng, sampler.thin)
        yield Configuration(eta=sampler.eta[0].copy(), N=N)
