"""Asymptotic estimates of P[S_L = N] against the exact law."""

import logging
import math

from ..asymptotics.nagaev import asymptotic_params, doney_split, nagaev_estimate
from ..asymptotics.scales import NRule, c_lambda, resolve_N
from ..models import EstimateCase
from ..oracle import exact_pSLN
from .base import Check, CheckContext, CheckResult
from .reference import CRAMER_MODEL, POWER_LAW_MODEL, STRETCHED_MODEL, marginal_for

logger = logging.getLogger(__name__)

# exact laws at the largest L of these checks
LARGE_BUDGET = 5e10


def log_relative_error(log_estimate: float, log_exact: float) -> float:
    """|P_est / P_exact - 1| from log values."""
    return abs(math.expm1(log_estimate - log_exact))


class NagaevCheck(Check):
    name = "nagaev"
    criterion = 8
    description = "Nagaev cases 2 and 3 converge in L; case 1 with lambda_0 within 10%"

    SIZES = (64, 128, 256, 512, 1024)
    FINAL_TOL = 0.2
    CASE1_TOL = 0.1
    CASE1_L = 512
    # finite-L noise allowed in the monotone trend
    TREND_SLACK = 0.02

    def _case3_excess(self, L: int) -> float:
        return 12.0 * L ** (1.0 / (2.0 * STRETCHED_MODEL.lam)) * (L / 64.0) ** 0.25

    def run(self, context: CheckContext) -> CheckResult:
        marginal = marginal_for(STRETCHED_MODEL)
        params = asymptotic_params(marginal)
        budget = max(context.budget, LARGE_BUDGET)
        t = 2.0 * c_lambda(STRETCHED_MODEL.lam, STRETCHED_MODEL.b)
        sizes = context.pick(self.SIZES[:4], self.SIZES)

        errors: dict[str, list[float]] = {EstimateCase.NAGAEV_2.value: [], EstimateCase.NAGAEV_3.value: []}
        for L in sizes:
            targets = (
                (EstimateCase.NAGAEV_2, resolve_N(NRule(kind="t", value=t), marginal, L).N),
                (EstimateCase.NAGAEV_3, int(round(marginal.rho_c * L + self._case3_excess(L)))),
            )
            for case, N in targets:
                estimate = nagaev_estimate(params, L, N, case=case)
                error = log_relative_error(estimate.log_p, exact_pSLN(marginal, L, N, budget))
                logger.debug(f"{case.value} L={L} N={N}: relative error {error:.4f}")
                errors[case.value].append(error)

        problems = []
        for label, series in errors.items():
            if any(later > earlier + self.TREND_SLACK for earlier, later in zip(series, series[1:])):
                problems.append(f"{label} error not decreasing")
            if len(sizes) == len(self.SIZES) and series[-1] >= self.FINAL_TOL:
                problems.append(f"{label} error {series[-1]:.3f} at L={sizes[-1]}")

        cramer = marginal_for(CRAMER_MODEL)
        L = self.CASE1_L
        N = int(round(cramer.rho_c * L + 1.5 * cramer.sigma * math.sqrt(L)))
        log_exact = exact_pSLN(cramer, L, N, budget)
        with_lambda0 = nagaev_estimate(asymptotic_params(cramer), L, N, case=EstimateCase.NAGAEV_1)
        without_lambda0 = nagaev_estimate(asymptotic_params(cramer, cramer=(0.0,)), L, N, case=EstimateCase.NAGAEV_1)
        case1_error = log_relative_error(with_lambda0.log_p, log_exact)
        if case1_error >= self.CASE1_TOL:
            problems.append(f"case 1 error {case1_error:.3f}")

        return self._result(
            not problems,
            "; ".join(problems) or f"case 2/3 errors at L={sizes[-1]}: {errors['Nagaev2'][-1]:.3f} / {errors['Nagaev3'][-1]:.3f}",
            sizes=list(sizes),
            errors=errors,
            case1_error=case1_error,
            case1_error_without_lambda0=log_relative_error(without_lambda0.log_p, log_exact),
        )


class DoneySplitCheck(Check):
    name = "doney"
    criterion = 9
    description = "Gaussian plus big-jump estimate at the power-law critical scale within 25%"

    TOL = 0.25

    def run(self, context: CheckContext) -> CheckResult:
        marginal = marginal_for(POWER_LAW_MODEL)
        L = context.pick(2**10, 2**14)
        N = resolve_N(NRule(kind="gammal1", value=0.0), marginal, L).N
        estimate = doney_split(marginal, L, N)
        log_exact = exact_pSLN(marginal, L, N, max(context.budget, LARGE_BUDGET))
        error = log_relative_error(estimate.log_p, log_exact)
        return self._result(
            error < self.TOL,
            f"relative error {error:.3f} at L={L}, N={N} ({estimate.case.value})",
            L=L,
            N=N,
            log_p_estimate=estimate.log_p,
            log_p_exact=log_exact,
            relative_error=error,
            components=estimate.components,
        )
