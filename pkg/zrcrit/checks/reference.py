"""Reference models shared by the acceptance checks."""

from functools import lru_cache

from ..marginal import Marginal, critical_stats
from ..models import Family, ModelSpec

# g(n) = 1 + 2 / n^0.6
STRETCHED_MODEL = ModelSpec(family=Family.STRETCHED_RATES, b=2.0, lam=0.6)
# g(n) = 1 + 5 / n
POWER_LAW_MODEL = ModelSpec(family=Family.POWER_LAW_RATES, b=5.0, lam=1.0)
# w(n) = exp(-(1 / 0.55) n^0.55), calibrates the first Cramér coefficient
CRAMER_MODEL = ModelSpec(family=Family.EXPLICIT_STRETCHED_WEIGHTS, b=1.0, lam=0.45)


@lru_cache(maxsize=None)
def marginal_for(spec: ModelSpec) -> Marginal:
    return critical_stats(spec)


def relative_error(estimate: float, exact: float) -> float:
    return abs(estimate / exact - 1.0)
