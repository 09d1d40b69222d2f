"""Critical single-site stationary law built from jump rates.

All weights are held in the log domain; probabilities are only materialized after
normalization because stretched-exponential weights underflow long before the
support cutoff is reached.
"""

import logging
import math
from typing import Any, Callable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import optimize, special

from .errors import InfiniteVarianceError, NonConvergentError, SupercriticalError
from .models import Family, ModelSpec, PartitionValue

logger = logging.getLogger(__name__)

# Cutoff search
INITIAL_CUTOFF = 64
MAX_CUTOFF = 1 << 22
MOMENT_TOL = 1e-10

# Asymptotic series for the tail prefactor
_SERIES_TOL = 1e-17
_MAX_SERIES_TERMS = 400


class Marginal(BaseModel):
    """Normalized critical single-site law p_k = w(k) / z(1) on 0..K.

    Attributes:
        spec: Model the law was built from (None for hand-made test laws)
        K: Support cutoff
        log_w: Log weights log w(n), n = 0..K
        log_p: Log probabilities, n = 0..K
        log_survival: log P[eta > m], m = 0..K, including the mass beyond K
        log_z: Log partition function at fugacity 1
        tail_mass: Bound on the probability mass beyond K
        rho_c: Critical density
        sigma2: Critical variance
        kappa3: Third cumulant (None when infinite)
        kappa4: Fourth cumulant (None when infinite)
        A_tail: Probability-level tail prefactor
        A_tail_spread: Relative disagreement of the prefactor between the last two dyadic windows
    """

    spec: Optional[ModelSpec] = None
    K: int = Field(..., ge=1)
    log_w: np.ndarray
    log_p: np.ndarray
    log_survival: np.ndarray
    log_z: float
    tail_mass: float = Field(..., ge=0)
    rho_c: float
    sigma2: float
    kappa3: Optional[float] = None
    kappa4: Optional[float] = None
    A_tail: Optional[float] = None
    A_tail_spread: Optional[float] = None

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @property
    def p(self) -> np.ndarray:
        return np.exp(self.log_p)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    @property
    def lam(self) -> float:
        return self._require_spec().lam

    @property
    def b(self) -> float:
        return self._require_spec().b

    def _require_spec(self) -> ModelSpec:
        if self.spec is None:
            raise ValueError("this marginal was built from a raw pmf and carries no model parameters")
        return self.spec

    def to_json_dict(self) -> dict[str, Any]:
        """JSON-ready summary (family, b, lambda, K, moments, A_tail, p)."""
        spec = self.spec
        return {
            "family": spec.family.value if spec else None,
            "b": spec.b if spec else None,
            "lambda": spec.lam if spec else None,
            "K": self.K,
            "rho_c": self.rho_c,
            "sigma2": self.sigma2,
            "kappa3": self.kappa3,
            "kappa4": self.kappa4,
            "A_tail": self.A_tail,
            "tail_mass": self.tail_mass,
            "p": self.p.tolist(),
        }

    @classmethod
    def from_pmf(cls, p: "np.ndarray | list[float]") -> "Marginal":
        """Build a finite-support marginal directly from probabilities.

        Used for small hand-checkable laws (uniform, two-point) in tests and examples.

        Raises:
            ValueError: If p is not a probability vector
        """
        probs = np.asarray(p, dtype=float)
        if probs.ndim != 1 or probs.size < 2:
            raise ValueError("p must be a vector with at least two entries")
        if (probs < 0).any() or abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("p must be non-negative and sum to 1")
        with np.errstate(divide="ignore"):
            log_p = np.log(probs)
        n = np.arange(probs.size, dtype=float)
        rho = float(np.dot(n, probs))
        centered = n - rho
        return cls(
            spec=None,
            K=probs.size - 1,
            log_w=_frozen(log_p),
            log_p=_frozen(log_p),
            log_survival=_frozen(_suffix_log_survival(log_p, -np.inf)),
            log_z=0.0,
            tail_mass=0.0,
            rho_c=rho,
            sigma2=float(np.dot(centered**2, probs)),
            kappa3=float(np.dot(centered**3, probs)),
            kappa4=float(np.dot(centered**4, probs) - 3.0 * np.dot(centered**2, probs) ** 2),
        )


def log_rates(spec: ModelSpec, n_max: int) -> np.ndarray:
    """Log jump rates log g(n) for n = 0..n_max, with log g(0) = -inf."""
    n = np.arange(1, n_max + 1, dtype=float)
    out = np.empty(n_max + 1)
    out[0] = -np.inf
    if spec.family is Family.EXPLICIT_STRETCHED_WEIGHTS:
        power = 1.0 - spec.lam
        out[1:] = spec.stretch_coefficient * (n**power - (n - 1.0) ** power)
    else:
        out[1:] = np.log1p(spec.b * n ** (-spec.lam))
    return out


def build_weights(spec: ModelSpec, K: int) -> np.ndarray:
    """Log weights log w(n) = -sum_{k<=n} log g(k) for n = 0..K.

    Args:
        spec: Model specification
        K: Largest occupation number to include

    Returns:
        Vector of length K + 1 with log w(0) = 0

    Raises:
        ValueError: If K < 1
    """
    if K < 1:
        raise ValueError(f"K must be at least 1, got {K}")
    if spec.family is Family.EXPLICIT_STRETCHED_WEIGHTS:
        n = np.arange(K + 1, dtype=float)
        return -spec.stretch_coefficient * n ** (1.0 - spec.lam)
    log_w = np.empty(K + 1)
    log_w[0] = 0.0
    log_w[1:] = -np.cumsum(log_rates(spec, K)[1:])
    return log_w


def _tilted_terms(log_w: np.ndarray, phi: float) -> np.ndarray:
    if phi == 1.0:
        return log_w
    n = np.arange(log_w.size, dtype=float)
    if phi == 0.0:
        terms = np.full(log_w.size, -np.inf)
        terms[0] = log_w[0]
        return terms
    return log_w + n * math.log(phi)


def _envelope_ratio(spec: ModelSpec, K: int) -> float:
    """Upper bound on w(n+1)/w(n) for K <= n < 2K."""
    if spec.family is Family.EXPLICIT_STRETCHED_WEIGHTS:
        return math.exp(-spec.b * (2.0 * K) ** (-spec.lam))
    return 1.0 / (1.0 + spec.b * (2.0 * K) ** (-spec.lam))


def _log_power_law_tail(spec: ModelSpec, K: int, j: int) -> float:
    """log sum_{n>K} (n+1)...(n+j) w(n) for g(n) = 1 + b/n, in closed form."""
    b = spec.b
    if b <= 1.0 + j:
        return math.inf
    return float(special.gammaln(1.0 + b) + special.gammaln(K + 2.0 + j) - math.log(b - 1.0 - j) - special.gammaln(K + 1.0 + b))


def _log_tail_bound(spec: Optional[ModelSpec], log_w: np.ndarray, phi: float) -> float:
    """Log of an upper bound on sum_{n>K} w(n) phi^n."""
    K = log_w.size - 1
    if spec is None or phi <= 0.0:
        return -math.inf
    if phi < 1.0:
        return float(log_w[K] + (K + 1) * math.log(phi) - math.log1p(-phi))
    if spec.is_power_law:
        if spec.b <= 1.0:
            raise NonConvergentError(f"partition function diverges at phi=1 for b={spec.b} <= 1")
        return _log_power_law_tail(spec, K, 0)
    q = _envelope_ratio(spec, K)
    return float(math.log(2.0) + log_w[K] + math.log(q) - math.log1p(-q))


def _log_second_moment_tail(spec: ModelSpec, log_w: np.ndarray) -> float:
    K = log_w.size - 1
    if spec.is_power_law:
        return _log_power_law_tail(spec, K, 2)
    q = _envelope_ratio(spec, K)
    s = q / (1.0 - q)
    geometric = K * K * s + 2.0 * K * s / (1.0 - q) + s * (1.0 + q) / (1.0 - q) ** 2
    return float(math.log(2.0) + log_w[K] + math.log(geometric))


def partition(spec: Optional[ModelSpec], log_w: np.ndarray, phi: float) -> PartitionValue:
    """Partition function z(phi) = sum_n w(n) phi^n with a truncation bound.

    Args:
        spec: Model the weights came from (controls the tail bound)
        log_w: Log weights on 0..K
        phi: Fugacity in [0, 1]

    Returns:
        PartitionValue with the value and a bound on the omitted tail

    Raises:
        ValueError: If phi is outside [0, 1]
        NonConvergentError: For power-law weights with b <= 1 at phi = 1
    """
    if not 0.0 <= phi <= 1.0:
        raise ValueError(f"fugacity must lie in [0, 1], got {phi}")
    log_bound = _log_tail_bound(spec, log_w, phi)
    log_z = float(special.logsumexp(_tilted_terms(log_w, phi)))
    return PartitionValue(log_value=log_z, value=math.exp(log_z), error_bound=math.exp(log_bound))


def density(spec: Optional[ModelSpec], log_w: np.ndarray, phi: float) -> float:
    """Particle density R(phi) = sum_n n w(n) phi^n / z(phi)."""
    if not 0.0 <= phi <= 1.0:
        raise ValueError(f"fugacity must lie in [0, 1], got {phi}")
    if phi == 0.0:
        return 0.0
    _log_tail_bound(spec, log_w, phi)
    terms = _tilted_terms(log_w, phi)
    n = np.arange(1, log_w.size, dtype=float)
    return float(math.exp(special.logsumexp(terms[1:] + np.log(n)) - special.logsumexp(terms)))


def _suffix_log_survival(log_p: np.ndarray, log_beyond: float) -> np.ndarray:
    """log P[eta > m] for m = 0..K given log p on 0..K and the log mass beyond K."""
    at_least = np.logaddexp.accumulate(log_p[::-1])[::-1]
    survival = np.empty(log_p.size)
    survival[:-1] = np.logaddexp(at_least[1:], log_beyond)
    survival[-1] = log_beyond
    return survival


def _series_correction(spec: ModelSpec, n: np.ndarray) -> np.ndarray:
    """n-dependent part of sum_{k<=n} log g(k), from the expansion of log(1 + b k^-lambda)."""
    lam, b = spec.lam, spec.b
    n_min = float(n.min())
    total = np.zeros(n.size)
    for j in range(1, _MAX_SERIES_TERMS + 1):
        s = j * lam
        if abs(s - 1.0) < 1e-12:
            h = np.log(n) + 0.5 / n - 1.0 / (12.0 * n * n)
        else:
            h = n ** (1.0 - s) / (1.0 - s) + 0.5 * n ** (-s) - s * n ** (-s - 1.0) / 12.0
        coefficient = (-1.0) ** (j + 1) * b**j / j
        total += coefficient * h
        if j * lam > 1.0 and abs(coefficient) * n_min ** (1.0 - s) < _SERIES_TOL:
            break
    return total


def _tail_prefactor(spec: ModelSpec, log_p: np.ndarray, log_z: float) -> tuple[float, float]:
    """Prefactor A of p_n ~ A n^-b (lambda = 1) or A exp(-(b/(1-lambda)) n^(1-lambda)).

    Rate families: log p_n plus the known n-dependence of the partial sums of
    log g(k) is constant up to rapidly vanishing terms; it is averaged over the
    windows [K/4, K/2] and [K/2, K] and the later window is reported.
    """
    if spec.family is Family.EXPLICIT_STRETCHED_WEIGHTS:
        return math.exp(-log_z), 0.0
    K = log_p.size - 1
    if spec.lam <= 0.5:
        logger.warning(
            f"Stretched rates with lambda={spec.lam} <= 1/2 carry lower-order exponent terms; "
            f"A_tail is the prefactor of the full expansion"
        )
    estimates = []
    for lo, hi in ((K // 4, K // 2), (K // 2, K)):
        n = np.arange(lo, hi + 1, dtype=float)
        estimates.append(float(np.mean(log_p[lo : hi + 1] + _series_correction(spec, n))))
    spread = abs(math.expm1(estimates[1] - estimates[0]))
    return math.exp(estimates[1]), spread


def _initial_cutoff(spec: ModelSpec) -> int:
    need = 4.0 * (4.0 * spec.b) ** (1.0 / spec.lam)
    K = INITIAL_CUTOFF
    while need > K // 4 and K < MAX_CUTOFF:
        K *= 2
    return K


def critical_stats(spec: ModelSpec) -> Marginal:
    """Build the critical marginal with its moments and tail prefactor.

    The cutoff K doubles until the bounded tail mass falls below spec.cutoff_tol
    and the second-moment tail below MOMENT_TOL. For power-law rates the omitted
    tails are added back in closed form, so rho_c and sigma2 do not depend on K.

    Args:
        spec: Model specification

    Returns:
        Marginal

    Raises:
        InfiniteVarianceError: If lambda = 1 and b <= 3
    """
    if spec.is_power_law and spec.b <= 3.0:
        raise InfiniteVarianceError(f"power-law rates need b > 3 for a finite variance, got b={spec.b}")

    K = _initial_cutoff(spec)
    while True:
        log_w = build_weights(spec, K)
        log_z_trunc = float(special.logsumexp(log_w))
        mass_ok = _log_tail_bound(spec, log_w, 1.0) - log_z_trunc < math.log(spec.cutoff_tol)
        moment_ok = _log_second_moment_tail(spec, log_w) - log_z_trunc < math.log(MOMENT_TOL)
        if mass_ok and moment_ok:
            break
        if K >= MAX_CUTOFF:
            logger.warning(f"Support cutoff reached its cap K={K}; tail corrections are applied in closed form")
            break
        K *= 2
        logger.debug(f"Growing support cutoff to K={K}")

    n = np.arange(K + 1, dtype=float)
    if spec.is_power_law:
        log_t0 = _log_power_law_tail(spec, K, 0)
        log_z = float(np.logaddexp(log_z_trunc, log_t0))
        t0 = math.exp(log_t0 - log_z)
        t1 = math.exp(_log_power_law_tail(spec, K, 1) - log_z)
        log_t2 = _log_power_law_tail(spec, K, 2)
        t2 = math.exp(log_t2 - log_z) if math.isfinite(log_t2) else math.inf
        raw_tail = (t0, t1 - t0, t2 - 3.0 * t1 + t0)
        tail_mass = t0
        log_beyond = math.log(t0)
    else:
        log_z = log_z_trunc
        raw_tail = (0.0, 0.0, 0.0)
        tail_mass = math.exp(_log_tail_bound(spec, log_w, 1.0) - log_z)
        log_beyond = -math.inf

    log_p = log_w - log_z
    p = np.exp(log_p)
    rho = float(np.dot(n, p)) + raw_tail[1]
    centered = n - rho
    sigma2 = float(np.dot(centered**2, p)) + raw_tail[2] - 2.0 * rho * raw_tail[1] + rho * rho * raw_tail[0]

    kappa3: Optional[float] = None
    kappa4: Optional[float] = None
    if not spec.is_power_law or spec.b > 4.0:
        kappa3 = float(np.dot(centered**3, p))
    if not spec.is_power_law or spec.b > 5.0:
        kappa4 = float(np.dot(centered**4, p)) - 3.0 * sigma2 * sigma2

    A_tail, spread = _tail_prefactor(spec, log_p, log_z)
    logger.debug(f"Critical marginal for {spec.family.value}: K={K}, rho_c={rho:.6f}, sigma2={sigma2:.6f}, A={A_tail:.6g}")

    return Marginal(
        spec=spec,
        K=K,
        log_w=_frozen(log_w),
        log_p=_frozen(log_p),
        log_survival=_frozen(_suffix_log_survival(log_p, log_beyond)),
        log_z=log_z,
        tail_mass=tail_mass,
        rho_c=rho,
        sigma2=sigma2,
        kappa3=kappa3,
        kappa4=kappa4,
        A_tail=A_tail,
        A_tail_spread=spread,
    )


def log_pmf(marginal: Marginal, n_max: int) -> np.ndarray:
    """Log probabilities log p_n for n = 0..n_max, extending the weights past K if needed."""
    if n_max <= marginal.K:
        return marginal.log_p[: n_max + 1]
    if marginal.spec is None:
        extended = np.full(n_max + 1, -np.inf)
        extended[: marginal.K + 1] = marginal.log_p
        return extended
    return build_weights(marginal.spec, n_max) - marginal.log_z


def log_survival_to(marginal: Marginal, n_hi: int) -> np.ndarray:
    """log P[eta > m] for m = 0..n_hi."""
    if n_hi <= marginal.K:
        return marginal.log_survival[: n_hi + 1]
    n_far = 2 * n_hi
    lp = log_pmf(marginal, n_far)
    log_beyond = -math.inf
    spec = marginal.spec
    if spec is not None and spec.is_power_law:
        log_beyond = float(lp[n_far] + math.log(n_far + 1.0) - math.log(spec.b - 1.0))
    return _suffix_log_survival(lp, log_beyond)[: n_hi + 1]


def tail_interpolator(marginal: Marginal, n_hi: int) -> Callable[[float], float]:
    """Continuous log tail x -> log sum_{k>x} p_k.

    Log-linear interpolation between integers on 0..n_hi, the asymptotic tail
    beyond it.
    """
    survival = log_survival_to(marginal, n_hi)
    spec = marginal._require_spec()
    A = marginal.A_tail or 1.0

    def log_tail(x: float) -> float:
        if x < 0.0:
            return 0.0
        m = int(math.floor(x))
        if m + 1 <= n_hi:
            frac = x - m
            return float((1.0 - frac) * survival[m] + frac * survival[m + 1])
        if spec.is_power_law:
            return math.log(A) + (1.0 - spec.b) * math.log(x) - math.log(spec.b - 1.0)
        return math.log(A) - spec.stretch_coefficient * x ** (1.0 - spec.lam) + spec.lam * math.log(x) - math.log(spec.b)

    return log_tail


def pmf_at(marginal: Marginal, phi: float, n_max: Optional[int] = None) -> np.ndarray:
    """Grand-canonical law nu_phi on 0..n_max (n_max defaults to K)."""
    n_max = marginal.K if n_max is None else n_max
    if phi == 1.0:
        return np.exp(log_pmf(marginal, n_max))
    span = max(n_max, marginal.K)
    log_w = log_pmf(marginal, span) + marginal.log_z
    terms = _tilted_terms(log_w, phi)
    return np.exp(terms[: n_max + 1] - special.logsumexp(terms))


def solve_fugacity(marginal: Marginal, rho: float) -> float:
    """Fugacity phi with R(phi) = rho, by bisection on [0, 1].

    Raises:
        ValueError: If rho < 0
        SupercriticalError: If rho > rho_c
    """
    if rho < 0.0:
        raise ValueError(f"density must be non-negative, got {rho}")
    if rho > marginal.rho_c * (1.0 + 1e-12):
        raise SupercriticalError(f"density {rho} exceeds the critical density {marginal.rho_c}")
    if rho == 0.0:
        return 0.0
    if rho >= marginal.rho_c * (1.0 - 1e-12):
        return 1.0

    def residual(phi: float) -> float:
        return density(marginal.spec, marginal.log_w, phi) - rho

    if residual(1.0) <= 0.0:
        return 1.0
    phi = optimize.bisect(residual, 0.0, 1.0, xtol=1e-15, maxiter=200)
    return float(phi)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array, dtype=float)
    array.flags.writeable = False
    return array


def log_pmf_at(marginal: Marginal, x: float) -> float:
    """log p at a real occupation x, interpolated linearly in log between integers."""
    if x < 0.0:
        return -math.inf
    m = int(math.floor(x))
    lp = log_pmf(marginal, m + 1)
    frac = x - m
    if frac == 0.0:
        return float(lp[m])
    return float((1.0 - frac) * lp[m] + frac * lp[m + 1])


def effective_prefactor(marginal: Marginal, x: float) -> float:
    """p_x divided by its leading tail shape, i.e. the prefactor seen at occupation x.

    Tends to A_tail as x grows; for stretched rates the convergence is slow, so
    finite-size formulas evaluated near a condensate of size x use this value.
    """
    spec = marginal._require_spec()
    if x <= 0.0:
        raise ValueError(f"occupation must be positive, got {x}")
    if spec.is_power_law:
        return math.exp(log_pmf_at(marginal, x) + spec.b * math.log(x))
    return math.exp(log_pmf_at(marginal, x) + spec.stretch_coefficient * x ** (1.0 - spec.lam))
