"""Limit CDFs of the maximum, their norming sequences and the Bernoulli parameters p_gamma."""

import logging
import math
from typing import Optional

import numpy as np
from scipy import integrate, optimize, special, stats

from ..errors import NonPositiveError, QuadratureError
from ..marginal import Marginal, tail_interpolator
from ..samplers.tilted import solve_tilt

logger = logging.getLogger(__name__)

QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-10


def frechet_cdf(x, A: float, b: float):
    """exp(-A x^(1-b) / (b-1)) for x > 0, 0 otherwise."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        inner = np.where(x > 0.0, A * np.power(np.where(x > 0.0, x, 1.0), 1.0 - b) / (b - 1.0), np.inf)
    return np.exp(-inner)


def gumbel_cdf(x):
    """exp(-e^-x)."""
    return np.exp(-np.exp(-np.asarray(x, dtype=float)))


def gaussian_cdf(x, variance: float = 1.0):
    return stats.norm.cdf(np.asarray(x, dtype=float), scale=math.sqrt(variance))


def _mixture_integral(x: float, omega: float, b: float) -> float:
    if omega == 0.0:
        return x ** (1.0 - b) / (b - 1.0)
    result = integrate.quad(
        lambda t: math.exp(-omega * t) * t ** (-b),
        x,
        np.inf,
        epsabs=QUAD_EPSABS,
        epsrel=QUAD_EPSREL,
        limit=200,
        full_output=1,
    )
    if len(result) == 4:
        raise QuadratureError(f"quadrature failed at x={x}, omega={omega}: {result[3]}")
    return float(result[0])


def downside_mixture_cdf(x, omega: float, A: float, b: float):
    """exp(-A int_x^inf e^(-omega t) t^(-b) dt), the downside power-law limit at finite omega.

    Raises:
        QuadratureError: If the adaptive quadrature reports non-convergence
    """
    if omega < 0.0:
        raise ValueError(f"omega must be non-negative, got {omega}")
    points = np.atleast_1d(np.asarray(x, dtype=float))
    values = np.array([0.0 if xi <= 0.0 else math.exp(-A * _mixture_integral(xi, omega, b)) for xi in points])
    return values if np.ndim(x) else float(values[0])


def frechet_scale(L: int, b: float) -> float:
    """L^(1/(b-1))."""
    return L ** (1.0 / (b - 1.0))


def gumbel_normings(marginal: Marginal, L: int) -> tuple[float, float]:
    """(y_L, b_L) with L P[eta > y_L] = 1 and b_L = y_L^lambda / b.

    Raises:
        ValueError: For power-law marginals
    """
    spec = marginal._require_spec()
    if spec.is_power_law:
        raise ValueError("Gumbel normings apply to stretched families only")
    guess = ((1.0 - spec.lam) * math.log(L) / spec.b) ** (1.0 / (1.0 - spec.lam))
    n_hi = max(marginal.K, int(8.0 * guess) + 64)
    log_L = math.log(L)
    while True:
        log_tail = tail_interpolator(marginal, n_hi)
        if log_tail(float(n_hi - 1)) + log_L < 0.0:
            break
        n_hi *= 2
    if log_tail(0.0) + log_L <= 0.0:
        y = 0.0
    else:
        y = optimize.brentq(lambda v: log_tail(v) + log_L, 0.0, float(n_hi), xtol=1e-10)
    logger.debug(f"Gumbel normings at L={L}: y_L={y:.6g} (leading order {guess:.6g})")
    return float(y), float(y**spec.lam / spec.b)


def downside_pl_normings(marginal: Marginal, L: int, N: int) -> tuple[float, float]:
    """(B_L, s_L) with (|s| B_L)^b e^(|s| B_L) = A L |s|^(b-1), s the exact downside tilt."""
    spec = marginal._require_spec()
    if not spec.is_power_law:
        raise ValueError("B_L normings apply to power_law_rates only")
    s = abs(solve_tilt(marginal, None, N / L).s)
    if s == 0.0:
        raise NonPositiveError("downside normings need N below rho_c L")
    b = spec.b
    rhs = math.log(marginal.A_tail) + math.log(L) + (b - 1.0) * math.log(s)

    def residual(u: float) -> float:
        return b * math.log(u) + u - rhs

    hi = 1.0
    while residual(hi) < 0.0:
        hi *= 2.0
    u = optimize.brentq(residual, 1e-300, hi, xtol=1e-14)
    return float(u / s), float(s)


def downside_se_normings(marginal: Marginal, L: int, N: int) -> tuple[float, float]:
    """(gamma_L, zeta_L) for the stretched downside Gumbel limit.

    gamma_L solves A L zeta e^(s gamma - (b/(1-lambda)) gamma^(1-lambda)) = 1 with
    zeta = gamma^lambda / (|s| gamma^lambda + b).
    """
    spec = marginal._require_spec()
    if spec.is_power_law:
        raise ValueError("gamma_L/zeta_L normings apply to stretched families only")
    s = abs(solve_tilt(marginal, None, N / L).s)
    lam, b = spec.lam, spec.b
    log_front = math.log(marginal.A_tail) + math.log(L)

    def zeta(g: float) -> float:
        return g**lam / (s * g**lam + b)

    def residual(g: float) -> float:
        return log_front + math.log(zeta(g)) - s * g - spec.stretch_coefficient * g ** (1.0 - lam)

    lo, hi = 1e-6, 1.0
    if residual(lo) <= 0.0:
        return lo, zeta(lo)
    while residual(hi) > 0.0:
        hi *= 2.0
    g = optimize.brentq(residual, lo, hi, xtol=1e-10)
    return float(g), float(zeta(g))


def log_ell_gamma_powerlaw(sigma: float, b: float, A: float, gamma: float) -> float:
    """log of sigma^(b-1) (b-3)^(b/2) e^(-(b-3) gamma) / (sqrt(2 pi) A)."""
    return (b - 1.0) * math.log(sigma) + 0.5 * b * math.log(b - 3.0) - (b - 3.0) * gamma - 0.5 * math.log(2.0 * math.pi) - math.log(A)


def p_gamma_powerlaw(marginal: Marginal, gamma: float) -> float:
    """Condensed-phase probability 1 / (1 + ell_gamma); increases with gamma."""
    spec = marginal._require_spec()
    if not spec.is_power_law or spec.b <= 3.0:
        raise ValueError("p_gamma_powerlaw needs power_law_rates with b > 3")
    return float(special.expit(-log_ell_gamma_powerlaw(marginal.sigma, spec.b, marginal.A_tail, gamma)))


def log_ell_gamma_stretched(sigma2: float, lam: float, A: float, gamma: float) -> float:
    """log of sqrt(1+lambda) e^gamma / (2 A sqrt(pi sigma^2)), the fluid-to-condensed weight ratio."""
    return 0.5 * math.log(1.0 + lam) + gamma - math.log(2.0) - math.log(A) - 0.5 * math.log(math.pi * sigma2)


def p_gamma_stretched(marginal: Marginal, gamma: float, prefactor: Optional[float] = None) -> float:
    """Condensed-phase probability 1 / (1 + ell_gamma); decreases with gamma.

    prefactor replaces A_tail, e.g. by the effective prefactor at the condensate
    size when evaluating at finite L.

    Larger gamma in the sub-leading decomposition means fewer particles, so the
    condensed share falls, as the exact conditional law confirms.
    """
    spec = marginal._require_spec()
    if spec.is_power_law:
        raise ValueError("p_gamma_stretched needs a stretched family")
    A = marginal.A_tail if prefactor is None else prefactor
    return float(special.expit(-log_ell_gamma_stretched(marginal.sigma2, spec.lam, A, gamma)))


def gaussian_variance_correction(sigma2: float, lam: float, a: float) -> float:
    """sigma^2 / (1 - lambda (1-a) / a).

    Raises:
        NonPositiveError: If a <= lambda / (1 + lambda)
    """
    if a > 1.0:
        raise ValueError(f"a must not exceed 1, got {a}")
    if a <= lam / (1.0 + lam):
        raise NonPositiveError(f"a={a} is at or below lambda/(1+lambda)={lam / (1.0 + lam):.6g}")
    return sigma2 / (1.0 - lam * (1.0 - a) / a)
