"""Per-replica records of sampled configurations."""

import logging
from typing import Iterable, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..marginal import Marginal
from ..models import Configuration
from ..oracle import DEFAULT_BUDGET
from ..samplers.exact import ExactSampler
from ..samplers.streams import ReplicaStream
from ..samplers.tilted import TiltedRejectionSampler, solve_tilt

logger = logging.getLogger(__name__)


def top_two(eta: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(maximum, second largest occupation, argmax) per row of a (replicas, L) array."""
    eta = np.atleast_2d(eta)
    argmax = np.argmax(eta, axis=1)
    maxima = eta[np.arange(eta.shape[0]), argmax]
    if eta.shape[1] == 1:
        return maxima, np.zeros_like(maxima), argmax
    second = np.partition(eta, -2, axis=1)[:, -2]
    return maxima, second, argmax


class SampleBatch(BaseModel):
    """Replica records at fixed (L, N): maximum, second maximum, argmax, seed.

    Full configurations are kept only when `eta` is set.
    """

    L: int = Field(..., ge=1)
    N: int = Field(..., ge=0)
    regime: str = Field(default="", description="Case label of (L, N)")
    maxima: np.ndarray
    second_max: np.ndarray
    argmax: np.ndarray
    replica_ids: np.ndarray
    seeds: np.ndarray
    eta: Optional[np.ndarray] = None

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="after")
    def _check_records(self) -> "SampleBatch":
        size = self.maxima.size
        for name in ("second_max", "argmax", "replica_ids", "seeds"):
            if getattr(self, name).size != size:
                raise ValueError(f"{name} has {getattr(self, name).size} records, expected {size}")
        if (self.second_max > self.maxima).any():
            raise ValueError("second maximum exceeds the maximum")
        if (self.maxima > self.N).any():
            raise ValueError(f"maximum exceeds N={self.N}")
        if self.eta is not None:
            if self.eta.shape != (size, self.L):
                raise ValueError(f"eta has shape {self.eta.shape}, expected {(size, self.L)}")
            if (self.eta.sum(axis=1) != self.N).any():
                raise ValueError(f"a configuration does not sum to N={self.N}")
        return self

    @property
    def size(self) -> int:
        return int(self.maxima.size)

    @classmethod
    def from_eta(
        cls,
        eta: np.ndarray,
        N: int,
        replica_ids: Optional[Iterable[int]] = None,
        seeds: Optional[Iterable[int]] = None,
        keep_eta: bool = True,
        regime: str = "",
    ) -> "SampleBatch":
        eta = np.atleast_2d(np.asarray(eta, dtype=np.int64))
        replicas = eta.shape[0]
        maxima, second, argmax = top_two(eta)
        ids = np.arange(replicas) if replica_ids is None else np.fromiter(replica_ids, dtype=np.int64, count=replicas)
        seed_array = np.zeros(replicas, dtype=np.uint64) if seeds is None else np.fromiter(seeds, dtype=np.uint64, count=replicas)
        return cls(
            L=eta.shape[1],
            N=N,
            regime=regime,
            maxima=maxima,
            second_max=second,
            argmax=argmax,
            replica_ids=ids,
            seeds=seed_array,
            eta=eta if keep_eta else None,
        )


class SampleBatchBuilder:
    """Collects configurations one replica at a time.

    Only maxima, second maxima and argmax are retained unless keep_eta is set.
    """

    def __init__(self, N: int, keep_eta: bool = True, regime: str = ""):
        self.N = N
        self.keep_eta = keep_eta
        self.regime = regime
        self.L: Optional[int] = None
        self.rows: list[np.ndarray] = []
        self.records: list[tuple[int, int, int]] = []
        self.replica_ids: list[int] = []
        self.seeds: list[int] = []

    def add(self, configuration: Configuration, replica_id: int, seed: int) -> None:
        """
        Adds one sampled configuration.

        Raises:
            ValueError: If the configuration holds a different particle number
                or ring size than earlier ones
        """
        if configuration.N != self.N:
            raise ValueError(f"configuration holds {configuration.N} particles, batch expects {self.N}")
        if self.L is not None and configuration.L != self.L:
            raise ValueError(f"configuration has {configuration.L} sites, batch expects {self.L}")
        self.L = configuration.L
        maxima, second, argmax = top_two(configuration.eta)
        self.records.append((int(maxima[0]), int(second[0]), int(argmax[0])))
        if self.keep_eta:
            self.rows.append(np.asarray(configuration.eta))
        self.replica_ids.append(replica_id)
        self.seeds.append(seed)

    def build(self) -> SampleBatch:
        if not self.records:
            raise ValueError("no configurations were added")
        logger.debug(f"Building a batch of {len(self.records)} replicas at N={self.N}")
        records = np.array(self.records, dtype=np.int64)
        return SampleBatch(
            L=self.L,
            N=self.N,
            regime=self.regime,
            maxima=records[:, 0],
            second_max=records[:, 1],
            argmax=records[:, 2],
            replica_ids=np.array(self.replica_ids, dtype=np.int64),
            seeds=np.array(self.seeds, dtype=np.uint64),
            eta=np.vstack(self.rows) if self.keep_eta else None,
        )


def merge_batches(batches: Sequence[SampleBatch]) -> SampleBatch:
    """Concatenate batches at the same (L, N), ordered by replica id."""
    if not batches:
        raise ValueError("no batches to merge")
    first = batches[0]
    if any(b.L != first.L or b.N != first.N for b in batches):
        raise ValueError("batches differ in L or N")
    keep_eta = all(b.eta is not None for b in batches)
    ids = np.concatenate([b.replica_ids for b in batches])
    order = np.argsort(ids, kind="stable")
    return SampleBatch(
        L=first.L,
        N=first.N,
        regime=first.regime,
        maxima=np.concatenate([b.maxima for b in batches])[order],
        second_max=np.concatenate([b.second_max for b in batches])[order],
        argmax=np.concatenate([b.argmax for b in batches])[order],
        replica_ids=ids[order],
        seeds=np.concatenate([b.seeds for b in batches])[order],
        eta=np.vstack([b.eta for b in batches])[order] if keep_eta else None,
    )


def exact_batch(
    marginal: Marginal,
    L: int,
    N: int,
    streams: Sequence[ReplicaStream],
    keep_eta: bool = True,
    block_size: Optional[int] = None,
    budget: float = DEFAULT_BUDGET,
    regime: str = "",
) -> SampleBatch:
    """One exact configuration per replica stream."""
    sampler = ExactSampler(marginal, L, N, block_size=block_size, budget=budget)
    builder = SampleBatchBuilder(N, keep_eta=keep_eta, regime=regime)
    for stream in streams:
        builder.add(sampler.draw(stream.generator()), stream.replica_id, stream.seed)
    return builder.build()


def rejection_batch(
    marginal: Marginal,
    L: int,
    N: int,
    streams: Sequence[ReplicaStream],
    cap: Optional[int] = None,
    keep_eta: bool = False,
    regime: str = "",
) -> SampleBatch:
    """One tilted-rejection configuration per replica stream, conditioned on M_L <= cap."""
    sampler = TiltedRejectionSampler(solve_tilt(marginal, cap, N / L), L, N)
    builder = SampleBatchBuilder(N, keep_eta=keep_eta, regime=regime)
    for stream in streams:
        builder.add(sampler.draw(stream.generator()), stream.replica_id, stream.seed)
    logger.debug(f"Rejection batch at L={L}, N={N}: acceptance rate {sampler.acceptance_rate:.3g}")
    return builder.build()
