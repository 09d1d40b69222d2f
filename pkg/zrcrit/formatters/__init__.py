"""Output formatters for job results."""

from .base import CsvFormatter, ResultFormatter
from .check_text_formatter import CheckReportTextFormatter
from .exact_law_csv_formatter import ExactLawCsvFormatter
from .json_report_formatter import JsonReportFormatter, to_jsonable
from .samples_csv_formatter import ProfileCsvFormatter, SamplesCsvFormatter
from .stat_rows_csv_formatter import StatRowsCsvFormatter

__all__ = [
    "ResultFormatter",
    "CsvFormatter",
    "StatRowsCsvFormatter",
    "SamplesCsvFormatter",
    "ProfileCsvFormatter",
    "ExactLawCsvFormatter",
    "JsonReportFormatter",
    "CheckReportTextFormatter",
    "to_jsonable",
]
