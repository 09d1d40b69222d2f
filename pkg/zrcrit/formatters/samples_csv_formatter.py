"""CSV formatters for sampled replicas and their partial-sum profiles."""

import numpy as np

from ..stats.batch import SampleBatch
from .base import CsvFormatter


class SamplesCsvFormatter(CsvFormatter):
    """One row per replica: (replica_id, seed, L, N, M_L, second_max, argmax)."""

    columns = ("replica_id", "seed", "L", "N", "M_L", "second_max", "argmax")

    def format(self, batch: SampleBatch) -> str:
        output, writer = self._start()
        order = np.argsort(batch.replica_ids, kind="stable")
        for i in order:
            writer.writerow(
                [
                    int(batch.replica_ids[i]),
                    int(batch.seeds[i]),
                    batch.L,
                    batch.N,
                    int(batch.maxima[i]),
                    int(batch.second_max[i]),
                    int(batch.argmax[i]),
                ]
            )
        return output.getvalue()


class ProfileCsvFormatter(CsvFormatter):
    """Partial sums S_k = eta_1 + ... + eta_k per replica, k = 0..L."""

    columns = ("replica_id", "k", "S_k")

    def format(self, batch: SampleBatch) -> str:
        """
        Raises:
            ValueError: If the batch was sampled without configurations
        """
        if batch.eta is None:
            raise ValueError("profiles need full configurations; sample with keep_eta")
        output, writer = self._start()
        order = np.argsort(batch.replica_ids, kind="stable")
        for i in order:
            replica = int(batch.replica_ids[i])
            sums = np.concatenate(([0], np.cumsum(batch.eta[i])))
            writer.writerows((replica, k, int(s)) for k, s in enumerate(sums))
        return output.getvalue()
