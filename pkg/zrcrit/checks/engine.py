"""Engine running acceptance checks."""

import logging
import time
from typing import Optional, Sequence

from pydantic import BaseModel

from .base import Check, CheckContext, CheckResult, CheckStatus, Profile

logger = logging.getLogger(__name__)


class CheckReport(BaseModel):
    """Results of a verify run."""

    profile: Profile
    seed: int
    results: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def failed(self) -> list[CheckResult]:
        return [result for result in self.results if not result.passed]


class CheckEngine:
    """Runs registered checks and collects their results.

    Example:
        >>> engine = CheckEngine.with_default_checks()
        >>> report = engine.run_all(CheckContext(profile="quick", seed=7))
        >>> report.passed
        True
    """

    def __init__(self) -> None:
        self._checks: list[Check] = []

    def get_checks(self) -> list[Check]:
        """
        Returns list of all registered checks.

        Returns:
            List of checks (read-only)
        """
        return list(self._checks)

    def add_check(self, check: Check) -> None:
        """
        Adds check to engine.

        Raises:
            TypeError: If check is not an instance of Check
            ValueError: If check is None or its name is already registered
        """
        if check is None:
            raise ValueError("Check cannot be None")
        if not isinstance(check, Check):
            raise TypeError(f"Check must be an instance of Check, got {type(check)}")
        if any(existing.name == check.name for existing in self._checks):
            raise ValueError(f"Check {check.name!r} is already registered")
        self._checks.append(check)

    def run_all(self, context: CheckContext, only: Optional[Sequence[str]] = None) -> CheckReport:
        """
        Runs every registered check, or only the named ones.

        A check raising an exception is reported with status error; the
        remaining checks still run.

        Raises:
            ValueError: If `only` names an unknown check
        """
        names = {check.name for check in self._checks}
        if only is not None:
            unknown = sorted(set(only) - names)
            if unknown:
                raise ValueError(f"Unknown checks: {', '.join(unknown)}. Available: {', '.join(sorted(names))}")

        results = []
        for check in self._checks:
            if only is not None and check.name not in only:
                continue
            logger.info(f"Running check {check.name} ({context.profile})")
            started = time.perf_counter()
            try:
                result = check.run(context)
            except Exception as e:
                logger.exception(f"Check {check.name} raised")
                result = CheckResult(name=check.name, criterion=check.criterion, status=CheckStatus.ERROR, message=f"{type(e).__name__}: {e}")
            result.duration = time.perf_counter() - started
            results.append(result)
        return CheckReport(profile=context.profile, seed=context.seed, results=results)

    @classmethod
    def with_default_checks(cls) -> "CheckEngine":
        """
        Creates engine with one check per acceptance criterion.

        Returns:
            CheckEngine with registered checks
        """
        engine = cls()
        # Import here to avoid circular dependencies
        from .asymptotic_checks import DoneySplitCheck, NagaevCheck
        from .bulk_checks import BulkFluctuationCheck
        from .constants_check import ConstantsCheck
        from .law_checks import FluctuationLawCheck, LawOfLargeNumbersCheck, PhaseMixtureCheck
        from .oracle_check import OracleSoundnessCheck
        from .sampler_checks import DynamicsStationarityCheck, SamplerExactnessCheck

        engine.add_check(ConstantsCheck())
        engine.add_check(OracleSoundnessCheck())
        engine.add_check(SamplerExactnessCheck())
        engine.add_check(DynamicsStationarityCheck())
        engine.add_check(LawOfLargeNumbersCheck())
        engine.add_check(PhaseMixtureCheck())
        engine.add_check(FluctuationLawCheck())
        engine.add_check(NagaevCheck())
        engine.add_check(DoneySplitCheck())
        engine.add_check(BulkFluctuationCheck())

        return engine
