"""Critical scales, scale coordinates and N-rules."""

import logging
import math
from typing import Literal, Optional

from pydantic import BaseModel, Field

from ..errors import InfiniteVarianceError
from ..marginal import Marginal
from ..models import NResolution, ThetaRule

logger = logging.getLogger(__name__)


class RegimeThresholds(BaseModel):
    """Case boundaries used when classifying (L, N)."""

    delta_factor: float = Field(default=0.1, gt=0, description="Slack delta as a multiple of c_lambda")
    theta_rule: ThetaRule = Field(default=ThetaRule.LOGLOG, description="Slowly growing theta_L")
    gamma_threshold: float = Field(default=3.0, gt=0, description="|gamma_L| beyond which the a/b cases apply")
    omega_low: float = Field(default=0.2, ge=0, description="omega_L below which the downside a-case applies")
    omega_high: float = Field(default=5.0, gt=0, description="omega_L above which the downside c-case applies")
    near_margin: float = Field(default=0.5, ge=0, description="Distance to a threshold that flags a report as near a boundary")


class NRule(BaseModel):
    """How N is derived from L.

    fixed: N = value. gammal1 / subl: value is gamma in the power-law or
    stretched sub-leading decomposition. t: value is t_L. omega: value is the
    downside omega_L. density: N = value * L.
    """

    kind: Literal["fixed", "gammal1", "subl", "t", "omega", "density"] = "fixed"
    value: float = 0.0


def c_lambda(lam: float, b: float) -> float:
    """c_lambda = (1+lambda) (2 lambda)^(-lambda/(1+lambda)) (b/(1-lambda))^(1/(1+lambda))."""
    if not 0.0 < lam < 1.0:
        raise ValueError(f"c_lambda needs lambda in (0, 1), got {lam}")
    if b <= 0.0:
        raise ValueError(f"b must be positive, got {b}")
    return (1.0 + lam) * (2.0 * lam) ** (-lam / (1.0 + lam)) * (b / (1.0 - lam)) ** (1.0 / (1.0 + lam))


def _require_finite_variance(marginal: Marginal) -> None:
    spec = marginal._require_spec()
    if spec.is_power_law and spec.b <= 3.0:
        raise InfiniteVarianceError(f"power-law scales need b > 3, got b={spec.b}")


def stretched_unit(marginal: Marginal, L: int) -> float:
    """(sigma^2 L)^(1/(1+lambda))."""
    return (marginal.sigma2 * L) ** (1.0 / (1.0 + marginal.lam))


def critical_scale(marginal: Marginal, L: int) -> float:
    """Delta_L: sigma sqrt((b-3) L log L) for lambda = 1, c_lambda (sigma^2 L)^(1/(1+lambda)) otherwise."""
    _require_finite_variance(marginal)
    spec = marginal._require_spec()
    if L < 2:
        raise ValueError(f"critical scale needs L >= 2, got {L}")
    if spec.is_power_law:
        return marginal.sigma * math.sqrt((spec.b - 3.0) * L * math.log(L))
    return c_lambda(spec.lam, spec.b) * stretched_unit(marginal, L)


def power_law_gamma(marginal: Marginal, L: int, N: int) -> float:
    """gamma_L from N = rho_c L + Delta_L (1 + (b/(2(b-3))) loglog L / log L + gamma_L / log L)."""
    b = marginal.b
    log_L = math.log(L)
    k = N - marginal.rho_c * L
    return log_L * (k / critical_scale(marginal, L) - 1.0) - b / (2.0 * (b - 3.0)) * math.log(log_L)


def t_coordinate(marginal: Marginal, L: int, N: int) -> float:
    """t_L = (N - rho_c L) / (sigma^2 L)^(1/(1+lambda))."""
    return (N - marginal.rho_c * L) / stretched_unit(marginal, L)


def _subleading_unit(marginal: Marginal, L: int) -> float:
    lam = marginal.lam
    c = c_lambda(lam, marginal.b)
    return (1.0 + lam) / (2.0 * lam * c) * (marginal.sigma2 * L) ** (lam / (1.0 + lam))


def subleading_gamma(marginal: Marginal, L: int, N: int) -> float:
    """gamma_L in N = rho_c L + c k_L - ((1+lambda)/(2 lambda c)) (sigma^2 L)^(lambda/(1+lambda)) (1.5 log L + gamma_L)."""
    lam = marginal.lam
    head = marginal.rho_c * L + c_lambda(lam, marginal.b) * stretched_unit(marginal, L)
    return (head - N) / _subleading_unit(marginal, L) - 1.5 * math.log(L)


def omega_power_law(marginal: Marginal, L: int, N: int) -> float:
    """omega_L in N = rho_c L - omega_L sigma^2 L^((b-2)/(b-1))."""
    b = marginal.b
    return (marginal.rho_c * L - N) / (marginal.sigma2 * L ** ((b - 2.0) / (b - 1.0)))


def omega_stretched(marginal: Marginal, L: int, N: int) -> float:
    """omega_L in N = rho_c L - omega_L L (log L)^(-1/(1-lambda))."""
    return (marginal.rho_c * L - N) * math.log(L) ** (1.0 / (1.0 - marginal.lam)) / L


def dense_condensate_fraction(marginal: Marginal, rho: float) -> float:
    """Limit of M_L / L at fixed density rho: rho - rho_c above criticality, 0 below."""
    return max(rho - marginal.rho_c, 0.0)


def _real_N(rule: NRule, marginal: Marginal, L: int) -> float:
    if rule.kind == "fixed":
        return rule.value
    if rule.kind == "density":
        return rule.value * L
    spec = marginal._require_spec()
    if rule.kind == "gammal1":
        if not spec.is_power_law:
            raise ValueError("N-rule gammal1 applies to power_law_rates only")
        log_L = math.log(L)
        correction = spec.b / (2.0 * (spec.b - 3.0)) * math.log(log_L) / log_L
        return marginal.rho_c * L + critical_scale(marginal, L) * (1.0 + correction + rule.value / log_L)
    if rule.kind == "subl":
        if spec.is_power_law or spec.lam <= 0.5:
            raise ValueError("N-rule subl applies to stretched families with lambda > 1/2")
        head = marginal.rho_c * L + c_lambda(spec.lam, spec.b) * stretched_unit(marginal, L)
        return head - _subleading_unit(marginal, L) * (1.5 * math.log(L) + rule.value)
    if rule.kind == "t":
        if spec.is_power_law:
            raise ValueError("N-rule t applies to stretched families only")
        return marginal.rho_c * L + rule.value * stretched_unit(marginal, L)
    if spec.is_power_law:
        return marginal.rho_c * L - rule.value * marginal.sigma2 * L ** ((spec.b - 2.0) / (spec.b - 1.0))
    return marginal.rho_c * L - rule.value * L * math.log(L) ** (-1.0 / (1.0 - spec.lam))


def resolve_N(rule: NRule, marginal: Marginal, L: int) -> NResolution:
    """Round the real-valued N of a rule to the nearest integer, recording both.

    Raises:
        ValueError: If the rule does not apply to the model or gives N < 0
    """
    if rule.kind == "fixed":
        if rule.value != int(rule.value):
            raise ValueError(f"fixed N must be an integer, got {rule.value}")
        return NResolution(rule="fixed", parameter=None, L=L, real_value=rule.value, N=int(rule.value))
    real = _real_N(rule, marginal, L)
    N = int(math.floor(real + 0.5))
    if N < 0:
        raise ValueError(f"N-rule {rule.kind}={rule.value} gives a negative N={N} at L={L}")
    logger.debug(f"Resolved N-rule {rule.kind}={rule.value} at L={L}: {real:.4f} -> {N}")
    return NResolution(rule=rule.kind, parameter=rule.value, L=L, real_value=real, N=N)
