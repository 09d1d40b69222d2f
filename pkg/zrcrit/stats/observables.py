"""Observables of sample batches: excess fraction, phase mixture, second maximum, local equivalence."""

import logging
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import stats

from ..errors import InsufficientSamplesError
from ..marginal import Marginal, pmf_at, solve_fugacity
from ..models import CaseLabel, StatRow
from .batch import SampleBatch

logger = logging.getLogger(__name__)

MIN_EXPECTED_COUNT = 5.0


def excess_mass(marginal: Marginal, L: int, N: int) -> float:
    return N - marginal.rho_c * L


class ExcessFraction(BaseModel):
    """Empirical law of M_L / (N - rho_c L)."""

    values: np.ndarray
    mean: float
    ci_lo: float
    ci_hi: float

    model_config = ConfigDict(arbitrary_types_allowed=True)

    def to_row(self, batch: SampleBatch) -> StatRow:
        return StatRow(statistic="excess_fraction", regime=batch.regime, L=batch.L, N=batch.N, value=self.mean, ci_lo=self.ci_lo, ci_hi=self.ci_hi)


def excess_fraction(batch: SampleBatch, marginal: Marginal, confidence: float = 0.95) -> ExcessFraction:
    """Ratios M_L / (N - rho_c L) with a t-interval for their mean.

    Raises:
        ValueError: If N equals rho_c L
    """
    k = excess_mass(marginal, batch.L, batch.N)
    if k == 0.0:
        raise ValueError("excess fraction is undefined at N = rho_c L")
    values = batch.maxima / k
    mean = float(values.mean())
    if batch.size > 1 and values.std() > 0.0:
        lo, hi = stats.t.interval(confidence, batch.size - 1, loc=mean, scale=stats.sem(values))
    else:
        lo = hi = mean
    return ExcessFraction(values=values, mean=mean, ci_lo=float(lo), ci_hi=float(hi))


def condensate_threshold(marginal: Marginal, L: int, N: int, case: Optional[CaseLabel] = None) -> float:
    """Half the predicted condensate: (N - rho_c L)/2, or (lambda/(1+lambda))(N - rho_c L) near the critical stretched case."""
    k = excess_mass(marginal, L, N)
    if case is CaseLabel.SE_C:
        return marginal.lam / (1.0 + marginal.lam) * k
    return 0.5 * k


def classify_condensed(batch: SampleBatch, threshold: float) -> np.ndarray:
    """True for replicas whose maximum exceeds the threshold."""
    return batch.maxima > threshold


class PhaseMixture(BaseModel):
    """Observed condensed fraction against a predicted p_gamma."""

    threshold: float
    replicas: int
    condensed: int
    fraction: float
    ci_lo: float
    ci_hi: float
    predicted: Optional[float] = None
    p_value: Optional[float] = None
    condensed_excess_fraction: Optional[float] = Field(default=None, description="Mean M_L / (N - rho_c L) over condensed replicas")
    fluid_excess_fraction: Optional[float] = None

    @property
    def both_phases(self) -> bool:
        return 0 < self.condensed < self.replicas

    def to_rows(self, batch: SampleBatch) -> list[StatRow]:
        rows = [
            StatRow(
                statistic="condensed_fraction",
                regime=batch.regime,
                L=batch.L,
                N=batch.N,
                value=self.fraction,
                ci_lo=self.ci_lo,
                ci_hi=self.ci_hi,
                p_value=self.p_value,
            )
        ]
        if self.predicted is not None:
            rows.append(StatRow(statistic="p_gamma", regime=batch.regime, L=batch.L, N=batch.N, value=self.predicted))
        if self.condensed_excess_fraction is not None:
            rows.append(
                StatRow(statistic="condensed_excess_fraction", regime=batch.regime, L=batch.L, N=batch.N, value=self.condensed_excess_fraction)
            )
        return rows


def phase_mixture_test(
    batch: SampleBatch,
    marginal: Marginal,
    threshold: Optional[float] = None,
    predicted: Optional[float] = None,
    confidence: float = 0.95,
) -> PhaseMixture:
    """Split replicas into condensed and fluid ones and compare the condensed share to `predicted`.

    The interval is the exact (Clopper-Pearson) binomial one.
    """
    k = excess_mass(marginal, batch.L, batch.N)
    if threshold is None:
        case = CaseLabel(batch.regime) if batch.regime in CaseLabel._value2member_map_ else None
        threshold = condensate_threshold(marginal, batch.L, batch.N, case)
    condensed = classify_condensed(batch, threshold)
    count = int(condensed.sum())
    test = stats.binomtest(count, batch.size, p=predicted if predicted is not None else 0.5)
    interval = test.proportion_ci(confidence_level=confidence, method="exact")
    ratios = batch.maxima / k if k != 0.0 else None
    return PhaseMixture(
        threshold=threshold,
        replicas=batch.size,
        condensed=count,
        fraction=count / batch.size,
        ci_lo=float(interval.low),
        ci_hi=float(interval.high),
        predicted=predicted,
        p_value=float(test.pvalue) if predicted is not None else None,
        condensed_excess_fraction=float(ratios[condensed].mean()) if ratios is not None and count else None,
        fluid_excess_fraction=float(ratios[~condensed].mean()) if ratios is not None and count < batch.size else None,
    )


class SecondMaxSummary(BaseModel):
    """Quantiles of the second largest occupation and of its ratio to the maximum."""

    quantiles: dict[float, float]
    median_ratio: float
    mean: float


def second_max_summary(batch: SampleBatch, levels: Sequence[float] = (0.1, 0.5, 0.9)) -> SecondMaxSummary:
    positive = batch.maxima > 0
    ratio = batch.second_max[positive] / batch.maxima[positive]
    return SecondMaxSummary(
        quantiles={q: float(np.quantile(batch.second_max, q)) for q in levels},
        median_ratio=float(np.median(ratio)) if ratio.size else 0.0,
        mean=float(batch.second_max.mean()),
    )


def empirical_pmf(values: np.ndarray, n_max: int) -> np.ndarray:
    """Relative frequencies of 0..n_max; larger values are dropped."""
    counts = np.bincount(np.asarray(values, dtype=np.int64), minlength=n_max + 1)[: n_max + 1]
    return counts / max(values.size, 1)


def tv_distance(p: np.ndarray, q: np.ndarray) -> float:
    """Total variation distance of two laws on 0..n, padding the shorter with zeros."""
    size = max(len(p), len(q))
    p = np.pad(np.asarray(p, dtype=float), (0, size - len(p)))
    q = np.pad(np.asarray(q, dtype=float), (0, size - len(q)))
    return 0.5 * float(np.abs(p - q).sum())


def chi_square_test(counts: np.ndarray, probabilities: np.ndarray, min_expected: float = MIN_EXPECTED_COUNT) -> tuple[float, float, int]:
    """Pearson chi-square of counts against a law on the same support.

    Neighbouring bins are pooled from the right until each pooled bin expects at
    least `min_expected` observations.

    Returns:
        (statistic, p_value, degrees of freedom)

    Raises:
        InsufficientSamplesError: If fewer than two pooled bins remain
    """
    counts = np.asarray(counts, dtype=float)
    probabilities = np.asarray(probabilities, dtype=float)
    size = max(counts.size, probabilities.size)
    counts = np.pad(counts, (0, size - counts.size))
    probabilities = np.pad(probabilities, (0, size - probabilities.size))
    expected = probabilities / probabilities.sum() * counts.sum()

    pooled_obs: list[float] = []
    pooled_exp: list[float] = []
    obs_acc = exp_acc = 0.0
    for i in range(size - 1, -1, -1):
        obs_acc += counts[i]
        exp_acc += expected[i]
        if exp_acc >= min_expected:
            pooled_obs.append(obs_acc)
            pooled_exp.append(exp_acc)
            obs_acc = exp_acc = 0.0
    if pooled_obs:
        pooled_obs[-1] += obs_acc
        pooled_exp[-1] += exp_acc
    if len(pooled_obs) < 2:
        raise InsufficientSamplesError(f"only {len(pooled_obs)} bin(s) reach an expected count of {min_expected}")
    result = stats.chisquare(np.array(pooled_obs), np.array(pooled_exp))
    return float(result.statistic), float(result.pvalue), len(pooled_obs) - 1


class Equivalence(BaseModel):
    """Distance between the empirical bulk single-site law and nu_phi."""

    phi: float
    tv: float
    sites: int
    empirical: np.ndarray
    reference: np.ndarray

    model_config = ConfigDict(arbitrary_types_allowed=True)


def bulk_site_values(batch: SampleBatch, exclude_argmax: bool = True) -> np.ndarray:
    """All occupations of the retained configurations, without each replica's argmax site if asked."""
    if batch.eta is None:
        raise ValueError("equivalence needs full configurations; sample with keep_eta")
    if not exclude_argmax or batch.L == 1:
        return batch.eta.ravel()
    mask = np.ones(batch.eta.shape, dtype=bool)
    mask[np.arange(batch.size), batch.argmax] = False
    return batch.eta[mask]


def equivalence_test(
    batch: SampleBatch,
    marginal: Marginal,
    phi: Optional[float] = None,
    exclude_argmax: Optional[bool] = None,
) -> Equivalence:
    """TV distance between the bulk single-site law and the grand-canonical nu_phi.

    phi defaults to 1 at or above criticality and to the fugacity of N/L below it.
    The argmax site is excluded by default only above criticality.
    """
    density = batch.N / batch.L
    supercritical = density >= marginal.rho_c
    if phi is None:
        phi = 1.0 if supercritical else solve_fugacity(marginal, density)
    if exclude_argmax is None:
        exclude_argmax = supercritical
    values = bulk_site_values(batch, exclude_argmax)
    n_max = int(values.max()) if values.size else 0
    empirical = empirical_pmf(values, n_max)
    reference = pmf_at(marginal, phi, max(n_max, marginal.K))
    tv = tv_distance(empirical, reference)
    logger.debug(f"Equivalence at phi={phi:.6g}: TV={tv:.4g} over {values.size} sites")
    return Equivalence(phi=phi, tv=tv, sites=int(values.size), empirical=empirical, reference=reference)


def excess_fraction_rows(batch: SampleBatch, marginal: Marginal) -> list[StatRow]:
    summary = excess_fraction(batch, marginal)
    second = second_max_summary(batch)
    return [
        summary.to_row(batch),
        StatRow(statistic="second_max_median_ratio", regime=batch.regime, L=batch.L, N=batch.N, value=second.median_ratio),
        StatRow(statistic="mean_maximum", regime=batch.regime, L=batch.L, N=batch.N, value=float(batch.maxima.mean())),
    ]
