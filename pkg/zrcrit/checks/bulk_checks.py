"""Brownian-bridge bulk below criticality and Brownian-with-drift bulk in SE-b."""

import logging
import math

import numpy as np

from ..asymptotics.nagaev import a_of_t, alpha_root, asymptotic_params
from ..asymptotics.scales import NRule, c_lambda, resolve_N
from ..marginal import Marginal
from ..stats.batch import exact_batch
from ..stats.bulk import PathMode, bridge_covariance, bulk_paths, drift_variance, path_covariance
from .base import Check, CheckContext, CheckResult
from .reference import STRETCHED_MODEL, marginal_for

logger = logging.getLogger(__name__)

BRIDGE_TOL = 0.02
DRIFT_TOL = 0.15


def drift_centers(marginal: Marginal, L: int, N: int, t: float) -> tuple[float, float]:
    """(a_L, a(t)): the finite-L condensate fraction 1 - alpha and its limit at fixed t."""
    spec = marginal._require_spec()
    k = N - marginal.rho_c * L
    a_L = 1.0 - alpha_root(asymptotic_params(marginal), L, k)
    return a_L, a_of_t(spec.lam, spec.b, t)


class BulkFluctuationCheck(Check):
    """Bulk partial-sum paths against their Gaussian limits.

    The drift part compares the terminal variance of the Y paths with
    1 / (1 - lambda (1 - a) / a) at the finite-L fraction a = a_L, the same
    a_L that centres the paths. The limiting a(t) is reported next to it
    in the metrics and does not enter the tolerance.
    """

    name = "bulk"
    criterion = 10
    description = "X-path covariance vs Brownian bridge at N = rho_c L; Y-path drift variance in SE-b"

    def run(self, context: CheckContext) -> CheckResult:
        marginal = marginal_for(STRETCHED_MODEL)
        lam, b = STRETCHED_MODEL.lam, STRETCHED_MODEL.b

        L = context.pick(200, 1000)
        replicas = context.pick(4000, 100_000)
        N = int(math.floor(marginal.rho_c * L))
        batch = exact_batch(marginal, L, N, context.streams(0, replicas), keep_eta=True, block_size=32, budget=context.budget)
        paths = bulk_paths(batch, marginal, PathMode.X)
        gap = float(np.max(np.abs(path_covariance(paths) - bridge_covariance())))
        passed = gap <= BRIDGE_TOL

        L_b = context.pick(1024, 4096)
        replicas_b = context.pick(1000, 2000)
        t = 2.0 * c_lambda(lam, b)
        N_b = resolve_N(NRule(kind="t", value=t), marginal, L_b).N
        a_L, a_t = drift_centers(marginal, L_b, N_b, t)
        batch_b = exact_batch(marginal, L_b, N_b, context.streams(100, replicas_b), keep_eta=True, block_size=32, budget=context.budget)
        drift = drift_variance(bulk_paths(batch_b, marginal, PathMode.Y, a_L=a_L), lam=lam, a=a_L)
        passed &= drift.relative_error is not None and drift.relative_error <= DRIFT_TOL
        logger.info(f"Bridge covariance gap {gap:.4f}; drift variance {drift.terminal_variance:.3f} vs {drift.predicted_variance:.3f}")

        return self._result(
            passed,
            f"bridge covariance gap {gap:.4f}; drift variance {drift.terminal_variance:.3f} vs predicted {drift.predicted_variance:.3f}",
            bridge={"L": L, "N": N, "replicas": replicas, "max_covariance_gap": gap},
            drift={
                "L": L_b,
                "N": N_b,
                "a_L": a_L,
                "a_t": a_t,
                "terminal_variance": drift.terminal_variance,
                "slope_variance": drift.slope_variance,
                "predicted_variance": drift.predicted_variance,
                "bridge_correlation": drift.bridge_correlation,
            },
        )
