"""Closed-form scales, limit laws and moderate-deviation asymptotics."""

from .limits import (
    downside_mixture_cdf,
    downside_pl_normings,
    downside_se_normings,
    frechet_cdf,
    frechet_scale,
    gaussian_cdf,
    gaussian_variance_correction,
    gumbel_cdf,
    gumbel_normings,
    p_gamma_powerlaw,
    p_gamma_stretched,
)
from .nagaev import (
    AsymptoticParams,
    a_of_t,
    alpha_root,
    asymptotic_params,
    cramer_series,
    cramer_truncation_order,
    doney_split,
    nagaev_estimate,
    x_of_t,
)
from .regime import scale_coordinates
from .scales import (
    NRule,
    RegimeThresholds,
    c_lambda,
    critical_scale,
    dense_condensate_fraction,
    power_law_gamma,
    resolve_N,
    subleading_gamma,
    t_coordinate,
)

__all__ = [
    "AsymptoticParams",
    "NRule",
    "RegimeThresholds",
    "a_of_t",
    "alpha_root",
    "asymptotic_params",
    "c_lambda",
    "cramer_series",
    "cramer_truncation_order",
    "critical_scale",
    "dense_condensate_fraction",
    "doney_split",
    "downside_mixture_cdf",
    "downside_pl_normings",
    "downside_se_normings",
    "frechet_cdf",
    "frechet_scale",
    "gaussian_cdf",
    "gaussian_variance_correction",
    "gumbel_cdf",
    "gumbel_normings",
    "nagaev_estimate",
    "p_gamma_powerlaw",
    "p_gamma_stretched",
    "power_law_gamma",
    "resolve_N",
    "scale_coordinates",
    "subleading_gamma",
    "t_coordinate",
    "x_of_t",
]
