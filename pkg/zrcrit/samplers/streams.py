"""Independent per-replica random streams derived from one root seed."""

import numpy as np
from pydantic import BaseModel, Field


class ReplicaStream(BaseModel):
    """Seed of one replica; np.random.default_rng(seed) reproduces it on its own."""

    replica_id: int = Field(..., ge=0)
    seed: int = Field(..., ge=0)

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


def replica_streams(root_seed: int, replicas: int) -> list[ReplicaStream]:
    """Spawn `replicas` independent child seeds from root_seed."""
    if replicas < 1:
        raise ValueError(f"replicas must be at least 1, got {replicas}")
    children = np.random.SeedSequence(root_seed).spawn(replicas)
    return [
        ReplicaStream(replica_id=i, seed=int(child.generate_state(1, dtype=np.uint64)[0]))
        for i, child in enumerate(children)
    ]
