"""Continuous-time zero-range dynamics on a ring, simulated event by event."""

import logging
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..marginal import log_rates
from ..models import Configuration, ModelSpec

logger = logging.getLogger(__name__)

RNG_CHUNK = 4096


class HopKernel(str, Enum):
    """Where a departing particle goes."""

    TOTALLY_ASYMMETRIC = "totally_asymmetric"
    SYMMETRIC = "symmetric"


class DynamicsSpec(BaseModel):
    """Ring of L sites with rates g(n) from `spec` and a nearest-neighbour hop kernel."""

    spec: ModelSpec
    L: int = Field(..., ge=1, description="Ring size")
    hop: HopKernel = Field(default=HopKernel.TOTALLY_ASYMMETRIC, description="Hop kernel")

    model_config = ConfigDict(frozen=True)

    def hop_probabilities(self) -> dict[int, float]:
        """Offset -> probability; the values sum to 1."""
        if self.hop is HopKernel.TOTALLY_ASYMMETRIC:
            return {1: 1.0}
        return {-1: 0.5, 1: 0.5}


class RateTree:
    """Binary sum tree over site rates: point updates and proportional selection in O(log L)."""

    def __init__(self, rates: np.ndarray):
        self.size = 1 << max(int(rates.size - 1).bit_length(), 0)
        self.tree = np.zeros(2 * self.size)
        self.tree[self.size : self.size + rates.size] = rates
        for i in range(self.size - 1, 0, -1):
            self.tree[i] = self.tree[2 * i] + self.tree[2 * i + 1]

    @property
    def total(self) -> float:
        return float(self.tree[1])

    def update(self, site: int, rate: float) -> None:
        i = site + self.size
        self.tree[i] = rate
        i //= 2
        while i:
            self.tree[i] = self.tree[2 * i] + self.tree[2 * i + 1]
            i //= 2

    def find(self, u: float) -> int:
        """Site x with cumulative rate just above u, for 0 <= u < total."""
        i = 1
        while i < self.size:
            left = 2 * i
            if u < self.tree[left] or self.tree[left + 1] == 0.0:
                i = left
            else:
                u -= self.tree[left]
                i = left + 1
        return i - self.size


class KmcResult(BaseModel):
    """Final state and time averages of a trajectory."""

    configuration: Configuration
    t_end: float
    events: int
    histogram: np.ndarray = Field(..., description="Time-averaged fraction of sites holding j particles, j = 0..N")
    snapshots: Optional[np.ndarray] = Field(default=None, description="Configurations at regular times, shape (k, L)")

    model_config = ConfigDict(arbitrary_types_allowed=True)


class _OccupationClock:
    """Accumulates site-time spent at each occupation number."""

    def __init__(self, eta: np.ndarray, N: int):
        self.counts = np.bincount(eta, minlength=N + 1).astype(float)
        self.time = np.zeros(N + 1)
        self.last = np.zeros(N + 1)

    def move(self, t: float, old: int, new: int) -> None:
        for j, delta in ((old, -1.0), (new, 1.0)):
            self.time[j] += self.counts[j] * (t - self.last[j])
            self.last[j] = t
            self.counts[j] += delta

    def flush(self, t: float) -> np.ndarray:
        self.time += self.counts * (t - self.last)
        self.last[:] = t
        return self.time


def kmc_run(
    dynamics: DynamicsSpec,
    init: Configuration,
    t_end: float,
    rng: np.random.Generator,
    snapshot_interval: Optional[float] = None,
) -> KmcResult:
    """Run the zero-range dynamics from `init` up to time t_end.

    Each site x fires at rate g(eta_x), with g(0) = 0, and sends one particle
    to a neighbour drawn from the hop kernel.

    Args:
        dynamics: Ring, rates and hop kernel
        init: Starting configuration on the same ring
        t_end: Simulated time, non-negative
        rng: Random generator
        snapshot_interval: Record the full configuration every this much time

    Returns:
        KmcResult with the final configuration and the time-averaged
        single-site histogram
    """
    if t_end < 0:
        raise ValueError(f"t_end must be non-negative, got {t_end}")
    if init.L != dynamics.L:
        raise ValueError(f"initial configuration has {init.L} sites, dynamics expects {dynamics.L}")
    if snapshot_interval is not None and snapshot_interval <= 0:
        raise ValueError(f"snapshot_interval must be positive, got {snapshot_interval}")

    L, N = dynamics.L, init.N
    g = np.exp(log_rates(dynamics.spec, max(N, 1)))
    eta = init.eta.copy()
    tree = RateTree(g[eta])
    clock = _OccupationClock(eta, N)
    symmetric = dynamics.hop is HopKernel.SYMMETRIC

    snapshots: list[np.ndarray] = []
    next_snapshot = 0.0 if snapshot_interval is not None else np.inf

    t = 0.0
    events = 0
    waits = rng.standard_exponential(RNG_CHUNK)
    uniforms = rng.random((RNG_CHUNK, 2))
    cursor = 0
    while True:
        total = tree.total
        t_next = t + waits[cursor] / total if total > 0.0 else np.inf
        while next_snapshot <= min(t_next, t_end):
            snapshots.append(eta.copy())
            next_snapshot += snapshot_interval
        if t_next > t_end:
            break

        t = t_next
        x = tree.find(min(uniforms[cursor, 0] * total, np.nextafter(total, 0.0)))
        step = -1 if symmetric and uniforms[cursor, 1] < 0.5 else 1
        y = (x + step) % L
        cursor += 1
        if cursor == RNG_CHUNK:
            waits = rng.standard_exponential(RNG_CHUNK)
            uniforms = rng.random((RNG_CHUNK, 2))
            cursor = 0

        if x == y:
            events += 1
            continue
        clock.move(t, int(eta[x]), int(eta[x]) - 1)
        clock.move(t, int(eta[y]), int(eta[y]) + 1)
        eta[x] -= 1
        eta[y] += 1
        tree.update(x, g[eta[x]])
        tree.update(y, g[eta[y]])
        events += 1

    occupation_time = clock.flush(t_end)
    histogram = occupation_time / (L * t_end) if t_end > 0 else np.bincount(eta, minlength=N + 1) / L
    logger.debug(f"KMC on L={L}, N={N} ran {events} events up to t={t_end}")
    return KmcResult(
        configuration=Configuration(eta=eta, N=N),
        t_end=t_end,
        events=events,
        histogram=histogram,
        snapshots=np.array(snapshots, dtype=np.int64) if snapshot_interval is not None else None,
    )
