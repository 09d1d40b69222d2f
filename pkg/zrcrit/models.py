"""Shared data models for zrcrit."""

from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Family(str, Enum):
    """Tail family of the single-site weights."""

    POWER_LAW_RATES = "power_law_rates"
    STRETCHED_RATES = "stretched_rates"
    EXPLICIT_STRETCHED_WEIGHTS = "explicit_stretched_weights"


class Side(str, Enum):
    """Direction of the excess mass relative to rho_c * L."""

    UPSIDE = "upside"
    DOWNSIDE = "downside"


class CaseLabel(str, Enum):
    """Regime of an (L, N) pair."""

    PL_A = "PL-a"
    PL_B = "PL-b"
    PL_C = "PL-c"
    PL_DOWN_A = "PL-down-a"
    PL_DOWN_B = "PL-down-b"
    PL_DOWN_C = "PL-down-c"
    SE_A = "SE-a"
    SE_B = "SE-b"
    SE_C = "SE-c"
    SE_DOWN = "SE-down"


class EstimateCase(str, Enum):
    """Which asymptotic formula produced an estimate of P[S_L = N]."""

    NAGAEV_1 = "Nagaev1"
    NAGAEV_2 = "Nagaev2"
    NAGAEV_3 = "Nagaev3"
    NAGAEV_4 = "Nagaev4"
    NAGAEV_5 = "Nagaev5"
    DONEY_GAUSSIAN = "DoneyGaussian"
    DONEY_CONDENSATE = "DoneyCondensate"
    DONEY_MIXED = "DoneyMixed"


class ThetaRule(str, Enum):
    """Slowly growing sequence separating the large-k Nagaev ranges."""

    LOGLOG = "loglog"
    SQRT_LOGLOG = "sqrt_loglog"

    def evaluate(self, L: int) -> float:
        """Value of theta_L, never below 1."""
        loglog = float(np.log(np.log(L))) if L > 2 else 0.0
        value = loglog if self is ThetaRule.LOGLOG else float(np.sqrt(max(loglog, 0.0)))
        return max(value, 1.0)


class ModelSpec(BaseModel):
    """Jump-rate (or weight) specification of a zero-range process.

    Rate families use g(n) = 1 + b / n^lambda; ExplicitStretchedWeights sets
    w(n) = exp(-(b / (1 - lambda)) n^(1 - lambda)) directly.
    """

    family: Family = Field(..., description="Tail family")
    b: float = Field(..., gt=0, description="Tail strength b")
    lam: float = Field(..., alias="lambda", gt=0, le=1, description="Tail exponent lambda")
    cutoff_tol: float = Field(default=1e-14, gt=0, lt=1e-6, description="Admissible tail mass beyond the support cutoff")

    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="ignore")

    @model_validator(mode="after")
    def _check_family(self) -> "ModelSpec":
        if self.lam == 1.0 and self.family is not Family.POWER_LAW_RATES:
            raise ValueError("lambda = 1 requires family power_law_rates")
        if self.lam < 1.0 and self.family is Family.POWER_LAW_RATES:
            raise ValueError("power_law_rates requires lambda = 1")
        return self

    @property
    def is_power_law(self) -> bool:
        return self.family is Family.POWER_LAW_RATES

    @property
    def stretch_coefficient(self) -> float:
        """Coefficient b / (1 - lambda) of the stretched exponent (infinite for lambda = 1)."""
        return float("inf") if self.is_power_law else self.b / (1.0 - self.lam)


class Configuration(BaseModel):
    """Occupation numbers of a ring of L sites holding N particles."""

    eta: np.ndarray = Field(..., description="Occupation vector")
    N: int = Field(..., ge=0, description="Total particle number")

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("eta", mode="before")
    @classmethod
    def _as_int_array(cls, value) -> np.ndarray:
        array = np.array(value, dtype=np.int64)
        array.flags.writeable = False
        return array

    @model_validator(mode="after")
    def _check_total(self) -> "Configuration":
        if self.eta.ndim != 1 or self.eta.size == 0:
            raise ValueError("eta must be a non-empty vector")
        if (self.eta < 0).any():
            raise ValueError("occupation numbers must be non-negative")
        if int(self.eta.sum()) != self.N:
            raise ValueError(f"occupation sum {int(self.eta.sum())} differs from N={self.N}")
        return self

    @property
    def L(self) -> int:
        return int(self.eta.size)

    @property
    def maximum(self) -> int:
        return int(self.eta.max())


class PartitionValue(BaseModel):
    """Value of the partition function with its truncation bound."""

    log_value: float
    value: float
    error_bound: float = Field(..., ge=0, description="Upper bound on the omitted tail of the series")


class NResolution(BaseModel):
    """Outcome of resolving an N-rule for a given system size."""

    rule: str
    parameter: Optional[float] = None
    L: int
    real_value: float
    N: int


class RegimeReport(BaseModel):
    """Classification of (L, N) together with all scale coordinates."""

    L: int
    N: int
    k: float = Field(..., description="Excess mass N - rho_c L")
    side: Side
    case: CaseLabel
    delta_L: float
    gamma_L: Optional[float] = None
    t_L: Optional[float] = None
    omega_L: Optional[float] = None
    p_gamma: Optional[float] = None
    alpha: Optional[float] = None
    a_L: Optional[float] = None
    a_t: Optional[float] = None
    normings: dict[str, float] = Field(default_factory=dict)
    near_boundary: bool = False
    notes: list[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_ranges(self) -> "RegimeReport":
        if self.p_gamma is not None and not 0.0 < self.p_gamma < 1.0:
            raise ValueError(f"p_gamma must lie in (0, 1), got {self.p_gamma}")
        if self.alpha is not None and self.a_L is not None and abs(self.a_L - (1.0 - self.alpha)) > 1e-12:
            raise ValueError("a_L must equal 1 - alpha")
        return self


class AsymptoticEstimate(BaseModel):
    """Leading-order estimate of log P[S_L = N] with the formula that produced it."""

    L: int
    N: int
    log_p: float
    case: EstimateCase
    components: dict[str, float] = Field(default_factory=dict, description="Per-branch log values in mixed cases")
    ambiguous: bool = False
    valid: bool = True

    @property
    def value(self) -> float:
        return float(np.exp(self.log_p))


class StatRow(BaseModel):
    """One reported statistic, the unit of the statistics CSV."""

    statistic: str
    regime: str = ""
    L: int
    N: int
    value: float
    ci_lo: Optional[float] = None
    ci_hi: Optional[float] = None
    p_value: Optional[float] = None
