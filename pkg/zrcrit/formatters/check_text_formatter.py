"""Text formatter for verify reports."""

from ..checks.base import CheckStatus
from ..checks.engine import CheckReport
from .base import ResultFormatter
from .colors import COLOR_CYAN, COLOR_GREEN, COLOR_RED, COLOR_RESET, COLOR_YELLOW


class CheckReportTextFormatter(ResultFormatter):
    """One colored line per check, then a summary."""

    EMOJI = {CheckStatus.PASSED: "✅", CheckStatus.FAILED: "❌", CheckStatus.ERROR: "⚠️"}
    COLORS = {CheckStatus.PASSED: COLOR_GREEN, CheckStatus.FAILED: COLOR_RED, CheckStatus.ERROR: COLOR_YELLOW}

    def _colorize(self, text: str, color: str) -> str:
        """Add color to text if colors are not disabled."""
        if self.no_color:
            return text
        return f"{color}{text}{COLOR_RESET}"

    def format(self, report: CheckReport) -> str:
        lines = [self._colorize(f"🔬 Acceptance checks ({report.profile}, seed {report.seed})", COLOR_CYAN), ""]
        for result in sorted(report.results, key=lambda r: r.criterion):
            status = self._colorize(result.status.value.upper(), self.COLORS[result.status])
            lines.append(f"{self.EMOJI[result.status]} [{result.criterion:>2}] {result.name:<14} {status}  {result.message} ({result.duration:.1f}s)")

        lines.append("")
        passed = sum(result.passed for result in report.results)
        summary = f"{passed}/{len(report.results)} checks passed"
        lines.append(self._colorize(summary, COLOR_GREEN if report.passed else COLOR_RED))
        return "\n".join(lines)
