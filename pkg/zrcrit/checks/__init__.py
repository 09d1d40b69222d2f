"""Acceptance checks run by `zrcrit verify`."""

from .asymptotic_checks import DoneySplitCheck, NagaevCheck
from .base import Check, CheckContext, CheckResult, CheckStatus
from .bulk_checks import BulkFluctuationCheck
from .constants_check import ConstantsCheck
from .engine import CheckEngine, CheckReport
from .law_checks import FluctuationLawCheck, LawOfLargeNumbersCheck, PhaseMixtureCheck
from .oracle_check import OracleSoundnessCheck
from .sampler_checks import DynamicsStationarityCheck, SamplerExactnessCheck

__all__ = [
    "Check",
    "CheckContext",
    "CheckResult",
    "CheckStatus",
    "CheckEngine",
    "CheckReport",
    "ConstantsCheck",
    "OracleSoundnessCheck",
    "SamplerExactnessCheck",
    "DynamicsStationarityCheck",
    "LawOfLargeNumbersCheck",
    "PhaseMixtureCheck",
    "FluctuationLawCheck",
    "NagaevCheck",
    "DoneySplitCheck",
    "BulkFluctuationCheck",
]
