"""Base interfaces for output formatters."""

import csv
from abc import ABC, abstractmethod
from io import StringIO
from typing import Any, Optional


class ResultFormatter(ABC):
    """Abstract class for formatting job results."""

    def __init__(self, no_color: bool = False):
        """
        Initialize formatter.

        Args:
            no_color: Disable colored output
        """
        self.no_color = no_color

    @abstractmethod
    def format(self, result: Any) -> str:
        """
        Format a job result.

        Args:
            result: Object produced by a job

        Returns:
            Formatted string
        """
        pass


class CsvFormatter(ResultFormatter):
    """CSV output headed by `# config_hash=... seed=...`.

    CSV carries no timestamps, so equal (config, seed) give byte-identical files.
    """

    columns: tuple[str, ...] = ()

    def __init__(self, config_hash: str = "", seed: Optional[int] = None, no_color: bool = False):
        super().__init__(no_color=no_color)
        self.config_hash = config_hash
        self.seed = seed

    def _start(self) -> tuple[StringIO, Any]:
        output = StringIO()
        output.write(f"# config_hash={self.config_hash} seed={'' if self.seed is None else self.seed}\n")
        writer = csv.writer(output, lineterminator="\n")
        writer.writerow(self.columns)
        return output, writer


def csv_value(value: Optional[float]) -> str:
    """Empty for missing values, repr otherwise."""
    if value is None:
        return ""
    return repr(float(value))
