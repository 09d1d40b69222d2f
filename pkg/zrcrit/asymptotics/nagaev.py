"""Moderate-deviation asymptotics of P[S_L = N].

Stretched tails use five k-ranges of the local moderate-deviation
estimates for stretched-exponential summands; power-law tails use the
Gaussian-plus-one-big-jump split.
"""

import logging
import math
import warnings
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import optimize

from ..errors import NoRootError, UnsupportedCramerError, ValidityWarning
from ..marginal import Marginal, log_pmf, log_pmf_at
from ..models import AsymptoticEstimate, EstimateCase, ThetaRule
from .scales import c_lambda, stretched_unit

logger = logging.getLogger(__name__)

ROOT_XTOL = 1e-14
_SCAN_POINTS = 512


class AsymptoticParams(BaseModel):
    """Constants shared by the stretched-exponential estimates.

    use_exact_tail replaces A exp(-gamma m^(1-lambda)) at the condensate size m
    by the exact p_m; the asymptotic prefactor converges slowly for rate
    families.
    """

    marginal: Marginal
    gamma: float = Field(..., description="Stretched exponent coefficient b / (1 - lambda)")
    c_lambda: float
    t_trunc: int = Field(..., ge=0)
    cramer: tuple[float, ...] = ()
    delta: float = Field(..., gt=0)
    theta_rule: ThetaRule = ThetaRule.LOGLOG
    use_exact_tail: bool = True

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @property
    def lam(self) -> float:
        return self.marginal.lam

    @property
    def b(self) -> float:
        return self.marginal.b


def cramer_truncation_order(lam: float) -> int:
    """t = floor(1/lambda) - 1."""
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"lambda must lie in (0, 1], got {lam}")
    return max(int(math.floor(1.0 / lam + 1e-12)) - 1, 0)


def cramer_series(marginal: Marginal, order: int) -> list[float]:
    """First `order` Cramer coefficients, in the k^3/L^2 lambda(k/L) convention.

    Raises:
        UnsupportedCramerError: For order >= 2
    """
    if order < 0:
        raise ValueError(f"order must be non-negative, got {order}")
    if order >= 2:
        raise UnsupportedCramerError(f"Cramer coefficients beyond lambda_0 must be supplied (order {order})")
    if order == 0:
        return []
    if marginal.kappa3 is None:
        raise UnsupportedCramerError("lambda_0 needs a finite third cumulant")
    return [marginal.kappa3 / (6.0 * marginal.sigma2**3)]


def asymptotic_params(
    marginal: Marginal,
    cramer: Optional[Sequence[float]] = None,
    delta_factor: float = 0.1,
    theta_rule: ThetaRule = ThetaRule.LOGLOG,
    use_exact_tail: bool = True,
) -> AsymptoticParams:
    """Build AsymptoticParams for a stretched marginal.

    Raises:
        UnsupportedCramerError: If lambda <= 1/3 and no coefficients are supplied
    """
    spec = marginal._require_spec()
    if spec.is_power_law:
        raise ValueError("Nagaev asymptotics apply to stretched families (lambda < 1)")
    t_trunc = cramer_truncation_order(spec.lam)
    if cramer is None:
        coefficients = cramer_series(marginal, t_trunc)
    else:
        coefficients = list(cramer)
        if len(coefficients) < t_trunc:
            raise UnsupportedCramerError(f"{t_trunc} Cramer coefficients are needed, {len(coefficients)} supplied")
        coefficients = coefficients[:t_trunc]
    c = c_lambda(spec.lam, spec.b)
    return AsymptoticParams(
        marginal=marginal,
        gamma=spec.stretch_coefficient,
        c_lambda=c,
        t_trunc=t_trunc,
        cramer=tuple(coefficients),
        delta=delta_factor * c,
        theta_rule=theta_rule,
        use_exact_tail=use_exact_tail,
    )


def _cramer_polynomial(params: AsymptoticParams, u: float) -> float:
    return sum(coef * u**j for j, coef in enumerate(params.cramer))


def _r_lambda(params: AsymptoticParams, x: float) -> float:
    """R_lambda(x) = sigma^2 sum_j lambda_j (j + 3) x^(j+1)."""
    return params.marginal.sigma2 * sum(coef * (j + 3) * x ** (j + 1) for j, coef in enumerate(params.cramer))


def _branch_root(func, upper: float) -> float:
    grid = np.linspace(0.0, upper, _SCAN_POINTS + 1)[1:]
    previous = func(0.0)
    lo = 0.0
    for point in grid:
        value = func(point)
        if previous < 0.0 <= value:
            return float(optimize.bisect(func, lo, point, xtol=ROOT_XTOL, maxiter=500))
        previous, lo = value, point
    raise NoRootError("no root on the increasing branch alpha in (0, 1/(1+lambda)]")


def alpha_root(params: AsymptoticParams, L: int, k: float) -> float:
    """Smallest positive root alpha of sigma^2 L / k^(1+lambda) = alpha (1-alpha)^lambda (1 - R(alpha k / L)) / b.

    Raises:
        NoRootError: If k is below the existence threshold
    """
    lam, b = params.lam, params.b
    if k <= 0.0:
        raise NoRootError(f"excess k={k} must be positive")
    target = b * params.marginal.sigma2 * L / k ** (1.0 + lam)

    def residual(alpha: float) -> float:
        return alpha * (1.0 - alpha) ** lam * (1.0 - _r_lambda(params, alpha * k / L)) - target

    return _branch_root(residual, 1.0 / (1.0 + lam))


def a_of_t(lam: float, b: float, t: float) -> float:
    """Limit condensate fraction a(t) = 1 - alpha with alpha (1-alpha)^lambda = b / t^(1+lambda).

    Raises:
        NoRootError: If b / t^(1+lambda) exceeds the branch maximum
    """
    if t <= 0.0:
        raise NoRootError(f"t={t} must be positive")
    target = b / t ** (1.0 + lam)
    peak_at = 1.0 / (1.0 + lam)
    peak = peak_at * (1.0 - peak_at) ** lam
    if target > peak * (1.0 + 1e-12):
        raise NoRootError(f"t={t} is below the existence threshold (b/t^(1+lambda)={target:.6g} > {peak:.6g})")
    if target >= peak:
        return 1.0 - peak_at
    alpha = _branch_root(lambda a: a * (1.0 - a) ** lam - target, peak_at)
    return 1.0 - alpha


def x_of_t(lam: float, b: float, t: float) -> float:
    """x_t = t (1 - a(t)), the smallest positive root of b = x (t - x)^lambda."""
    return t * (1.0 - a_of_t(lam, b, t))


def _log_condensate_shape(params: AsymptoticParams, m: float) -> float:
    """log A - gamma m^(1-lambda), or the exact log p_m."""
    if params.use_exact_tail:
        return log_pmf_at(params.marginal, m)
    return math.log(params.marginal.A_tail) - params.gamma * m ** (1.0 - params.lam)


def _case_ranges(params: AsymptoticParams, L: int, k: float) -> list[EstimateCase]:
    lam = params.lam
    unit = stretched_unit(params.marginal, L)
    c, delta = params.c_lambda, params.delta
    theta = params.theta_rule.evaluate(L)
    r = L ** (1.0 / (2.0 * lam))
    matches = []
    if delta * math.sqrt(L) < k < (c - delta) * unit:
        matches.append(EstimateCase.NAGAEV_1)
    if (c + delta) * unit < k < r / theta:
        matches.append(EstimateCase.NAGAEV_2)
    if k > r * theta:
        matches.append(EstimateCase.NAGAEV_3)
    if (c - delta) * unit <= k <= (c + delta) * unit:
        matches.append(EstimateCase.NAGAEV_4)
    if r / theta <= k <= r * theta:
        matches.append(EstimateCase.NAGAEV_5)
    return matches


def _gaussian_term(params: AsymptoticParams, L: int, k: float) -> float:
    sigma2 = params.marginal.sigma2
    return -0.5 * math.log(2.0 * math.pi * sigma2 * L) - k * k / (2.0 * L * sigma2) + k**3 / L**2 * _cramer_polynomial(params, k / L)


def _split_term(params: AsymptoticParams, L: int, k: float) -> float:
    lam, b = params.lam, params.b
    sigma2 = params.marginal.sigma2
    alpha = alpha_root(params, L, k)
    inner = 1.0 - sigma2 * b * lam * L / (k ** (1.0 + lam) * (1.0 - alpha) ** (1.0 + lam))
    if inner <= 0.0:
        logger.warning(f"Prefactor of the one-big-jump term is not positive at L={L}, k={k:.4g}")
        inner = np.finfo(float).tiny
    bulk = alpha * k
    return (
        math.log(L)
        + _log_condensate_shape(params, (1.0 - alpha) * k)
        - 0.5 * math.log(inner)
        - bulk * bulk / (2.0 * sigma2 * L)
        + bulk**3 / L**2 * _cramer_polynomial(params, bulk / L)
    )


def _big_jump_term(params: AsymptoticParams, L: int, k: float) -> float:
    return math.log(L) + _log_condensate_shape(params, k)


def _evaluate_case(params: AsymptoticParams, case: EstimateCase, L: int, k: float) -> tuple[float, dict[str, float]]:
    if case is EstimateCase.NAGAEV_1:
        return _gaussian_term(params, L, k), {}
    if case is EstimateCase.NAGAEV_2:
        return _split_term(params, L, k), {}
    if case is EstimateCase.NAGAEV_3:
        return _big_jump_term(params, L, k), {}
    if case is EstimateCase.NAGAEV_5:
        # squared slope of gamma k^(1-lambda) times L sigma^2 / 2; equals b^2 here
        slope = params.gamma * (1.0 - params.lam)
        correction = slope**2 * params.marginal.sigma2 * L / (2.0 * k ** (2.0 * params.lam))
        return _big_jump_term(params, L, k) + correction, {}
    if case is EstimateCase.NAGAEV_4:
        gaussian = _gaussian_term(params, L, k)
        try:
            condensed = _split_term(params, L, k)
        except NoRootError:
            logger.warning(f"No condensate root at L={L}, k={k:.4g}; mixed case reduces to the Gaussian term")
            return gaussian, {"gaussian": gaussian}
        return float(np.logaddexp(gaussian, condensed)), {"gaussian": gaussian, "condensate": condensed}
    raise ValueError(f"{case.value} is not a Nagaev case")


def nagaev_estimate(
    params: AsymptoticParams,
    L: int,
    N: int,
    case: Optional[EstimateCase] = None,
) -> AsymptoticEstimate:
    """Leading-order log P[S_L = N] for stretched tails.

    The case follows from the k-ranges; when the ranges match zero or several
    cases the first match (or case 1 below all ranges) is used and the estimate
    is flagged ambiguous. Passing `case` forces a formula.

    Raises:
        NoRootError: If a forced case 2 has no alpha root
    """
    k = N - params.marginal.rho_c * L
    if k <= 0.0:
        raise ValueError(f"Nagaev estimates need N > rho_c L (k={k:.4g})")
    matches = _case_ranges(params, L, k)
    if case is None:
        chosen = matches[0] if matches else EstimateCase.NAGAEV_1
        ambiguous = len(matches) != 1
        if ambiguous:
            logger.warning(f"Nagaev ranges match {[m.value for m in matches]} at L={L}, k={k:.4g}; using {chosen.value}")
    else:
        chosen = case
        ambiguous = case not in matches
    log_p, components = _evaluate_case(params, chosen, L, k)
    return AsymptoticEstimate(
        L=L,
        N=N,
        log_p=log_p,
        case=chosen,
        components=components,
        ambiguous=ambiguous,
        valid=bool(matches) or case is not None,
    )


def doney_split(marginal: Marginal, L: int, N: int) -> AsymptoticEstimate:
    """Gaussian term plus L p_floor(k) for power-law tails.

    A ValidityWarning is emitted when z = k / sqrt(L) < 1, where the split is
    outside its range.
    """
    spec = marginal._require_spec()
    if not spec.is_power_law or spec.b <= 3.0:
        raise ValueError("doney_split needs power_law_rates with b > 3")
    k = N - marginal.rho_c * L
    if k < 0.0:
        raise ValueError(f"doney_split needs N >= rho_c L (k={k:.4g})")
    z = k / math.sqrt(L)
    valid = z >= 1.0
    if not valid:
        message = f"Gaussian-plus-big-jump split at z={z:.3g} < 1 is outside its range"
        logger.warning(message)
        warnings.warn(message, ValidityWarning, stacklevel=2)
    gaussian = -0.5 * math.log(2.0 * math.pi * marginal.sigma2 * L) - k * k / (2.0 * marginal.sigma2 * L)
    index = int(math.floor(k))
    condensate = math.log(L) + float(log_pmf(marginal, index)[index])
    total = float(np.logaddexp(gaussian, condensate))
    if gaussian - condensate > math.log(1e3):
        label = EstimateCase.DONEY_GAUSSIAN
    elif condensate - gaussian > math.log(1e3):
        label = EstimateCase.DONEY_CONDENSATE
    else:
        label = EstimateCase.DONEY_MIXED
    return AsymptoticEstimate(
        L=L,
        N=N,
        log_p=total,
        case=label,
        components={"gaussian": gaussian, "condensate": condensate},
        valid=valid,
    )
