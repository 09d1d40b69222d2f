"""Base class for acceptance checks."""

from abc import ABC, abstractmethod
from enum import Enum
from typing import Any, Literal, TypeVar

from pydantic import BaseModel, Field

from ..oracle import DEFAULT_BUDGET
from ..samplers.streams import ReplicaStream, replica_streams

Profile = Literal["quick", "full"]
T = TypeVar("T")


class CheckStatus(str, Enum):
    """Outcome of a check."""

    PASSED = "passed"
    FAILED = "failed"
    ERROR = "error"


class CheckResult(BaseModel):
    """Outcome of one check with the numbers it was decided on."""

    name: str
    criterion: int
    status: CheckStatus
    message: str = ""
    metrics: dict[str, Any] = Field(default_factory=dict)
    duration: float = Field(default=0.0, ge=0, description="Wall time in seconds")

    @property
    def passed(self) -> bool:
        return self.status is CheckStatus.PASSED


class CheckContext(BaseModel):
    """Run-wide settings shared by every check."""

    profile: Profile = "quick"
    seed: int = Field(default=0, ge=0)
    budget: float = Field(default=DEFAULT_BUDGET, gt=0)

    def streams(self, key: int, replicas: int) -> list[ReplicaStream]:
        """Replica streams of one sub-experiment; `key` separates sub-experiments of a run."""
        return replica_streams(self.seed + key, replicas)

    def pick(self, quick: T, full: T) -> T:
        return quick if self.profile == "quick" else full


class Check(ABC):
    """Abstract class for acceptance checks.

    Each check reproduces one numbered acceptance criterion at the sizes of the
    context's profile and reports a CheckResult.

    Example:
        class ConstantsCheck(Check):
            name = "constants"
            criterion = 1

            def run(self, context: CheckContext) -> CheckResult:
                ...
    """

    name: str
    criterion: int
    description: str = ""

    def __init_subclass__(cls, **kwargs):
        """Validates that subclass defined the 'name' attribute."""
        super().__init_subclass__(**kwargs)
        if not getattr(cls, "name", None):
            raise TypeError(f"{cls.__name__} must define 'name' attribute")

    @abstractmethod
    def run(self, context: CheckContext) -> CheckResult:
        """
        Runs the check.

        Args:
            context: Profile, seed and budget

        Returns:
            CheckResult
        """
        pass

    def _result(self, passed: bool, message: str, **metrics: Any) -> CheckResult:
        return CheckResult(
            name=self.name,
            criterion=self.criterion,
            status=CheckStatus.PASSED if passed else CheckStatus.FAILED,
            message=message,
            metrics=metrics,
        )
