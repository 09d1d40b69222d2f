"""CSV formatter for reported statistics."""

from collections.abc import Iterable

from ..models import StatRow
from .base import CsvFormatter, csv_value


class StatRowsCsvFormatter(CsvFormatter):
    """CSV formatter for StatRow records."""

    columns = ("statistic", "regime", "L", "N", "value", "ci_lo", "ci_hi", "p_value")

    def format(self, rows: Iterable[StatRow]) -> str:
        """
        Format statistics as CSV.

        Args:
            rows: Statistics in reporting order

        Returns:
            CSV string
        """
        output, writer = self._start()
        for row in rows:
            writer.writerow(
                [
                    row.statistic,
                    row.regime,
                    row.L,
                    row.N,
                    csv_value(row.value),
                    csv_value(row.ci_lo),
                    csv_value(row.ci_hi),
                    csv_value(row.p_value),
                ]
            )
        return output.getvalue()
