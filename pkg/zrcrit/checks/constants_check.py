"""Critical constants of the stretched reference model."""

from ..asymptotics.scales import NRule, c_lambda, resolve_N
from .base import Check, CheckContext, CheckResult
from .reference import STRETCHED_MODEL, marginal_for

RHO_C, RHO_C_TOL = 0.842, 0.005
SIGMA2, SIGMA2_TOL = 2.55, 0.02
C_LAMBDA, C_LAMBDA_TOL = 4.09, 0.01
N_SUBL, N_SUBL_TOL = 1356, 1


class ConstantsCheck(Check):
    """rho_c, sigma^2, c_lambda and the sub-leading critical N at L = 1024."""

    name = "constants"
    criterion = 1
    description = "rho_c, sigma2, c_lambda and N(subl, gamma=0, L=1024) of g(n) = 1 + 2/n^0.6"

    def run(self, context: CheckContext) -> CheckResult:
        marginal = marginal_for(STRETCHED_MODEL)
        c = c_lambda(STRETCHED_MODEL.lam, STRETCHED_MODEL.b)
        resolution = resolve_N(NRule(kind="subl", value=0.0), marginal, 1024)
        checks = {
            "rho_c": abs(marginal.rho_c - RHO_C) <= RHO_C_TOL,
            "sigma2": abs(marginal.sigma2 - SIGMA2) <= SIGMA2_TOL,
            "c_lambda": abs(c - C_LAMBDA) <= C_LAMBDA_TOL,
            "N_crit": abs(resolution.N - N_SUBL) <= N_SUBL_TOL,
        }
        failed = [key for key, ok in checks.items() if not ok]
        return self._result(
            not failed,
            "all constants within tolerance" if not failed else f"out of tolerance: {', '.join(failed)}",
            rho_c=marginal.rho_c,
            sigma2=marginal.sigma2,
            c_lambda=c,
            N_crit=resolution.N,
            N_crit_real=resolution.real_value,
        )
