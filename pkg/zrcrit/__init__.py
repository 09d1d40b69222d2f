"""zrcrit - condensation of zero-range processes at criticality."""

__version__ = "0.1.0"

from .marginal import Marginal, critical_stats  # noqa: E402
from .models import CaseLabel, Configuration, Family, ModelSpec, RegimeReport  # noqa: E402
from .oracle import exact_pSLN, sum_distribution  # noqa: E402

__all__ = [
    "CaseLabel",
    "Configuration",
    "Family",
    "Marginal",
    "ModelSpec",
    "RegimeReport",
    "critical_stats",
    "exact_pSLN",
    "sum_distribution",
    "__version__",
]
