"""CSV formatter for the exact law of S_L."""

from ..oracle import ExactLaw
from .base import CsvFormatter, csv_value


class ExactLawCsvFormatter(CsvFormatter):
    """Rows (n, log_p) for n = 0..n_max."""

    columns = ("n", "log_p")

    def format(self, law: ExactLaw) -> str:
        output, writer = self._start()
        for n, log_p in law.to_rows():
            writer.writerow([n, csv_value(log_p)])
        return output.getvalue()
