"""Classification of (L, N) into the upside and downside cases."""

import logging
import math
from typing import Optional

from ..errors import NonPositiveError, NoRootError, UnreachableError
from ..marginal import Marginal, effective_prefactor
from ..models import CaseLabel, RegimeReport, Side
from .limits import (
    downside_pl_normings,
    downside_se_normings,
    frechet_scale,
    gaussian_variance_correction,
    gumbel_normings,
    p_gamma_powerlaw,
    p_gamma_stretched,
)
from .nagaev import a_of_t, alpha_root, asymptotic_params
from .scales import (
    RegimeThresholds,
    c_lambda,
    critical_scale,
    omega_power_law,
    omega_stretched,
    power_law_gamma,
    subleading_gamma,
    t_coordinate,
)

logger = logging.getLogger(__name__)


def _near(value: float, threshold: float, margin: float) -> bool:
    return abs(abs(value) - threshold) < margin


def _power_law_report(marginal: Marginal, L: int, N: int, k: float, thresholds: RegimeThresholds) -> dict:
    b = marginal.b
    fields: dict = {"notes": [], "normings": {}}
    if k >= 0.0:
        gamma = power_law_gamma(marginal, L, N)
        fields["gamma_L"] = gamma
        fields["near_boundary"] = _near(gamma, thresholds.gamma_threshold, thresholds.near_margin)
        if gamma > thresholds.gamma_threshold:
            fields["case"] = CaseLabel.PL_B
            fields["a_L"] = 1.0
            fields["a_t"] = 1.0
            fields["normings"] = {"center": k, "scale": marginal.sigma * math.sqrt(L)}
        elif gamma < -thresholds.gamma_threshold:
            fields["case"] = CaseLabel.PL_A
            fields["normings"] = {"frechet_scale": frechet_scale(L, b)}
        else:
            fields["case"] = CaseLabel.PL_C
            fields["p_gamma"] = p_gamma_powerlaw(marginal, gamma)
            fields["normings"] = {"condensate": k}
        return fields

    omega = omega_power_law(marginal, L, N)
    fields["omega_L"] = omega
    fields["near_boundary"] = abs(omega - thresholds.omega_low) < 0.1 * thresholds.omega_low or abs(omega - thresholds.omega_high) < 0.1 * thresholds.omega_high
    if omega < thresholds.omega_low:
        fields["case"] = CaseLabel.PL_DOWN_A
        fields["normings"] = {"frechet_scale": frechet_scale(L, b)}
    elif omega > thresholds.omega_high:
        fields["case"] = CaseLabel.PL_DOWN_C
        if N == 0:
            fields["normings"] = {"B_L": 0.0, "s_L": 0.0}
            fields["notes"].append("N = 0: the only configuration is empty, no fluctuation scale")
        else:
            B_L, s_L = downside_pl_normings(marginal, L, N)
            fields["normings"] = {"B_L": B_L, "s_L": s_L}
    else:
        fields["case"] = CaseLabel.PL_DOWN_B
        fields["normings"] = {"frechet_scale": frechet_scale(L, b), "omega": omega}
    return fields


def _stretched_report(marginal: Marginal, L: int, N: int, k: float, thresholds: RegimeThresholds) -> dict:
    lam, b = marginal.lam, marginal.b
    fields: dict = {"notes": [], "normings": {}}
    if k < 0.0:
        omega = omega_stretched(marginal, L, N)
        fields["omega_L"] = omega
        fields["case"] = CaseLabel.SE_DOWN
        if N == 0:
            # all sites empty: the tilt runs to -inf and M_L = 0 surely
            fields["normings"] = {"gamma_L": 0.0, "zeta_L": 0.0}
            fields["notes"].append("N = 0: the only configuration is empty, no fluctuation scale")
        elif omega < thresholds.omega_low:
            y_L, b_L = gumbel_normings(marginal, L)
            fields["normings"] = {"gamma_L": y_L, "zeta_L": b_L}
        else:
            gamma_L, zeta_L = downside_se_normings(marginal, L, N)
            fields["normings"] = {"gamma_L": gamma_L, "zeta_L": zeta_L}
        return fields

    c = c_lambda(lam, b)
    delta = thresholds.delta_factor * c
    t = t_coordinate(marginal, L, N)
    fields["t_L"] = t
    if lam > 0.5:
        gamma = subleading_gamma(marginal, L, N)
        fields["gamma_L"] = gamma
        fields["near_boundary"] = _near(gamma, thresholds.gamma_threshold, thresholds.near_margin)
        if gamma > thresholds.gamma_threshold:
            case = CaseLabel.SE_A
        elif gamma < -thresholds.gamma_threshold:
            case = CaseLabel.SE_B
        else:
            case = CaseLabel.SE_C
    else:
        fields["near_boundary"] = abs(abs(t - c) - delta) < 0.25 * delta
        if t < c - delta:
            case = CaseLabel.SE_A
        elif t > c + delta:
            case = CaseLabel.SE_B
        else:
            case = CaseLabel.SE_C
            fields["notes"].append("critical case for lambda <= 1/2 has no explicit p_gamma")
    fields["case"] = case

    if case is CaseLabel.SE_A:
        y_L, b_L = gumbel_normings(marginal, L)
        fields["normings"] = {"y_L": y_L, "b_L": b_L}
        return fields

    try:
        params = asymptotic_params(marginal, delta_factor=thresholds.delta_factor, theta_rule=thresholds.theta_rule)
        alpha = alpha_root(params, L, k)
        fields["alpha"] = alpha
        fields["a_L"] = 1.0 - alpha
    except (NoRootError, ValueError) as e:
        fields["notes"].append(f"alpha root unavailable: {e}")

    if case is CaseLabel.SE_C:
        fields["a_t"] = 2.0 * lam / (1.0 + lam)
        if "gamma_L" in fields:
            condensate = fields["a_t"] * k
            prefactor = effective_prefactor(marginal, condensate) if condensate > 0.0 else None
            fields["p_gamma"] = p_gamma_stretched(marginal, fields["gamma_L"], prefactor=prefactor)
        fields["normings"] = {"condensate": fields["a_t"] * k}
        return fields

    try:
        a_t = a_of_t(lam, b, t)
        fields["a_t"] = a_t
        a_center = fields.get("a_L", a_t)
        variance = gaussian_variance_correction(marginal.sigma2, lam, a_t)
        fields["normings"] = {"center": a_center * k, "scale": math.sqrt(variance * L)}
    except (NoRootError, NonPositiveError) as e:
        fields["notes"].append(f"a(t) unavailable: {e}")
    return fields


def scale_coordinates(marginal: Marginal, L: int, N: int, thresholds: Optional[RegimeThresholds] = None) -> RegimeReport:
    """Scale coordinates, case label, p_gamma, condensate fractions and normings of (L, N).

    Args:
        marginal: Critical marginal of a model (not a raw pmf)
        L: Number of sites
        N: Number of particles
        thresholds: Case boundaries (defaults apply when omitted)

    Returns:
        RegimeReport
    """
    if N < 0:
        raise ValueError(f"N must be non-negative, got {N}")
    thresholds = thresholds or RegimeThresholds()
    spec = marginal._require_spec()
    k = N - marginal.rho_c * L
    try:
        if spec.is_power_law:
            fields = _power_law_report(marginal, L, N, k, thresholds)
        else:
            fields = _stretched_report(marginal, L, N, k, thresholds)
    except UnreachableError as e:
        raise ValueError(f"cannot classify L={L}, N={N}: {e}") from e

    if fields.get("near_boundary"):
        fields["notes"].append("near a case boundary")
        logger.warning(f"L={L}, N={N} lies near a case boundary ({fields['case'].value})")
    return RegimeReport(
        L=L,
        N=N,
        k=k,
        side=Side.UPSIDE if k >= 0.0 else Side.DOWNSIDE,
        delta_L=critical_scale(marginal, L),
        **fields,
    )
