"""Goodness of fit of the normalized maximum against its predicted limit law.

Every regime maps to exactly one normalization in `normalize_maximum`, so the
norming constants used by a test are always the ones the regime report carries.
"""

import logging
from enum import Enum
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import stats

from ..asymptotics.limits import downside_mixture_cdf, frechet_cdf, frechet_scale, gaussian_cdf, gumbel_cdf, gumbel_normings
from ..errors import InsufficientSamplesError
from ..marginal import Marginal, log_survival_to
from ..models import CaseLabel, RegimeReport, StatRow

logger = logging.getLogger(__name__)

MIN_KS_SAMPLES = 1000


class LimitLaw(str, Enum):
    """Limit law of the normalized maximum."""

    GAUSSIAN = "gaussian"
    GUMBEL = "gumbel"
    FRECHET = "frechet"
    DOWNSIDE_MIXTURE = "downside_mixture"


_CASE_LAWS = {
    CaseLabel.PL_A: LimitLaw.FRECHET,
    CaseLabel.PL_B: LimitLaw.GAUSSIAN,
    CaseLabel.PL_DOWN_A: LimitLaw.FRECHET,
    CaseLabel.PL_DOWN_B: LimitLaw.DOWNSIDE_MIXTURE,
    CaseLabel.PL_DOWN_C: LimitLaw.GUMBEL,
    CaseLabel.SE_A: LimitLaw.GUMBEL,
    CaseLabel.SE_B: LimitLaw.GAUSSIAN,
    CaseLabel.SE_DOWN: LimitLaw.GUMBEL,
}


def limit_law_for(case: CaseLabel) -> LimitLaw:
    """Raises ValueError for the critical cases, whose maximum is a two-phase mixture."""
    if case not in _CASE_LAWS:
        raise ValueError(f"case {case.value} has no single limit law for the maximum")
    return _CASE_LAWS[case]


class NormalizedMaxima(BaseModel):
    law: LimitLaw
    values: np.ndarray
    cdf: Callable

    model_config = ConfigDict(arbitrary_types_allowed=True)


def normalize_maximum(maxima: np.ndarray, report: RegimeReport, marginal: Marginal) -> NormalizedMaxima:
    """Center and scale maxima with the norming constants of the report's case."""
    law = limit_law_for(report.case)
    m = np.asarray(maxima, dtype=float)
    normings = report.normings
    if law is LimitLaw.GAUSSIAN:
        values = (m - normings["center"]) / normings["scale"]
        cdf: Callable = gaussian_cdf
    elif law is LimitLaw.GUMBEL:
        if "B_L" in normings:
            values = (m - normings["B_L"]) * normings["s_L"]
        elif "y_L" in normings:
            values = (m - normings["y_L"]) / normings["b_L"]
        else:
            values = (m - normings["gamma_L"]) / normings["zeta_L"]
        cdf = gumbel_cdf
    elif law is LimitLaw.FRECHET:
        values = m / normings["frechet_scale"]
        A, b = marginal.A_tail, marginal.b

        def cdf(x):
            return frechet_cdf(x, A, b)

    else:
        values = m / normings["frechet_scale"]
        A, b, omega = marginal.A_tail, marginal.b, normings["omega"]

        def cdf(x):
            return downside_mixture_cdf(x, omega, A, b)

    return NormalizedMaxima(law=law, values=values, cdf=cdf)


class KsResult(BaseModel):
    """Kolmogorov-Smirnov distance of a sample to a reference law."""

    law: str
    statistic: float
    p_value: float
    samples: int

    def to_row(self, regime: str, L: int, N: int) -> StatRow:
        return StatRow(statistic=f"ks_{self.law}", regime=regime, L=L, N=N, value=self.statistic, p_value=self.p_value)


def _require_samples(n: int, minimum: int) -> None:
    if n < minimum:
        raise InsufficientSamplesError(f"KS tests need at least {minimum} samples, got {n}")


def max_law_tests(
    maxima: np.ndarray,
    report: RegimeReport,
    marginal: Marginal,
    rng: Optional[np.random.Generator] = None,
    min_samples: int = MIN_KS_SAMPLES,
) -> KsResult:
    """KS distance of the normalized maximum to its limit law.

    Integer maxima are spread uniformly over their unit cell before normalizing
    when `rng` is given, which removes the lattice step from the KS distance.
    p-values come from the asymptotic Kolmogorov distribution.
    """
    maxima = np.asarray(maxima, dtype=float)
    _require_samples(maxima.size, min_samples)
    if rng is not None:
        maxima = maxima + rng.random(maxima.size) - 0.5
    normalized = normalize_maximum(maxima, report, marginal)
    result = stats.kstest(normalized.values, normalized.cdf, method="asymp")
    logger.debug(f"KS vs {normalized.law.value} at L={report.L}, N={report.N}: D={result.statistic:.4g}")
    return KsResult(law=normalized.law.value, statistic=float(result.statistic), p_value=float(result.pvalue), samples=maxima.size)


def randomized_pit(values: np.ndarray, cdf_grid: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """F(v - 1) + U (F(v) - F(v - 1)) for integer values v and a CDF tabulated on 0..n.

    Uniform on (0, 1) exactly when the values follow the tabulated law.
    """
    values = np.asarray(values, dtype=np.int64)
    cdf_grid = np.asarray(cdf_grid, dtype=float)
    if (values < 0).any() or (values >= cdf_grid.size).any():
        raise ValueError(f"values must lie in 0..{cdf_grid.size - 1}")
    lower = np.concatenate(([0.0], cdf_grid))[values]
    upper = cdf_grid[values]
    return lower + rng.random(values.size) * (upper - lower)


def discrete_ks_test(
    values: np.ndarray,
    cdf_grid: np.ndarray,
    rng: np.random.Generator,
    min_samples: int = MIN_KS_SAMPLES,
) -> KsResult:
    """KS test of integer samples against an exact tabulated CDF, via the randomized PIT."""
    values = np.asarray(values)
    _require_samples(values.size, min_samples)
    pit = randomized_pit(values, cdf_grid, rng)
    result = stats.kstest(pit, "uniform", method="asymp")
    return KsResult(law="exact", statistic=float(result.statistic), p_value=float(result.pvalue), samples=values.size)


def control_maxima(marginal: Marginal, L: int, replicas: int, rng: np.random.Generator) -> np.ndarray:
    """Maxima of L unconditioned i.i.d. sites, drawn by inverting P[M_L <= m] = F(m)^L."""
    if L < 1 or replicas < 1:
        raise ValueError(f"need L >= 1 and replicas >= 1, got L={L}, replicas={replicas}")
    # M_L <= m iff log P[eta > m] <= log(1 - u^(1/L))
    log_target = np.log(-np.expm1(np.log(rng.random(replicas)) / L))
    floor = float(log_target.min())
    n_hi = max(marginal.K, 64)
    survival = log_survival_to(marginal, n_hi)
    while survival[-1] > floor:
        n_hi *= 2
        survival = log_survival_to(marginal, n_hi)
    # survival is non-increasing; the first m with survival <= target is the maximum
    maxima = np.searchsorted(-survival, -log_target, side="left")
    logger.debug(f"Drew {replicas} control maxima at L={L} with support up to {n_hi}")
    return maxima.astype(np.int64)


def tabulated_control_cdf(marginal: Marginal, L: int, n_hi: int) -> np.ndarray:
    """P[M_L <= m] = (1 - P[eta > m])^L for m = 0..n_hi."""
    survival = log_survival_to(marginal, n_hi)
    return np.exp(L * np.log1p(-np.minimum(np.exp(survival), 1.0 - 1e-300)))


def normalize_control_maximum(maxima: np.ndarray, marginal: Marginal, L: int) -> NormalizedMaxima:
    """Normalization of unconditioned i.i.d. maxima: Frechet for power laws, Gumbel otherwise."""
    spec = marginal._require_spec()
    m = np.asarray(maxima, dtype=float)
    if spec.is_power_law:
        A, b = marginal.A_tail, spec.b

        def cdf(x):
            return frechet_cdf(x, A, b)

        return NormalizedMaxima(law=LimitLaw.FRECHET, values=m / frechet_scale(L, b), cdf=cdf)
    y_L, b_L = gumbel_normings(marginal, L)
    return NormalizedMaxima(law=LimitLaw.GUMBEL, values=(m - y_L) / b_L, cdf=gumbel_cdf)


def control_law_test(
    maxima: np.ndarray,
    marginal: Marginal,
    L: int,
    rng: Optional[np.random.Generator] = None,
    min_samples: int = MIN_KS_SAMPLES,
) -> KsResult:
    """KS test of unconditioned maxima against their extreme-value limit."""
    maxima = np.asarray(maxima, dtype=float)
    _require_samples(maxima.size, min_samples)
    if rng is not None:
        maxima = maxima + rng.random(maxima.size) - 0.5
    normalized = normalize_control_maximum(maxima, marginal, L)
    result = stats.kstest(normalized.values, normalized.cdf, method="asymp")
    return KsResult(law=normalized.law.value, statistic=float(result.statistic), p_value=float(result.pvalue), samples=maxima.size)
