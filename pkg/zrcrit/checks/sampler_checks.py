"""Exactness of the samplers and stationarity of the dynamics against the oracle."""

import logging

import numpy as np

from ..asymptotics.scales import NRule, c_lambda, resolve_N
from ..models import Configuration
from ..oracle import conditional_max_cdf, conditional_site_marginal
from ..samplers.kmc import DynamicsSpec, HopKernel, kmc_run
from ..samplers.mcmc import MetropolisSampler, initial_configuration
from ..stats.batch import exact_batch
from ..stats.max_laws import discrete_ks_test
from ..stats.observables import chi_square_test, empirical_pmf, tv_distance
from .base import Check, CheckContext, CheckResult
from .reference import STRETCHED_MODEL, marginal_for

logger = logging.getLogger(__name__)

SIGNIFICANCE = 0.01


def exact_max_pmf(marginal, L: int, N: int, budget: float) -> np.ndarray:
    """P[M_L = m | S_L = N] for m = 0..N."""
    cdf = conditional_max_cdf(marginal, L, N, range(N + 1), budget)
    return np.diff(cdf, prepend=0.0)


class SamplerExactnessCheck(Check):
    name = "samplers"
    criterion = 3
    description = "exact sampler KS vs oracle in three regimes; MCMC TV vs oracle at L=16"

    L = 64
    MCMC_L, MCMC_N = 16, 20
    MCMC_CHAINS = 100

    def run(self, context: CheckContext) -> CheckResult:
        marginal = marginal_for(STRETCHED_MODEL)
        c = c_lambda(STRETCHED_MODEL.lam, STRETCHED_MODEL.b)
        draws = context.pick(2000, 10_000)
        metrics: dict = {}
        passed = True

        for key, (label, t) in enumerate((("SE-a", 0.5 * c), ("SE-c", c), ("SE-b", 2.0 * c))):
            N = resolve_N(NRule(kind="t", value=t), marginal, self.L).N
            batch = exact_batch(marginal, self.L, N, context.streams(100 * key, draws), keep_eta=False, budget=context.budget)
            cdf = conditional_max_cdf(marginal, self.L, N, range(N + 1), context.budget)
            ks = discrete_ks_test(batch.maxima, cdf, np.random.default_rng(context.seed + 100 * key + 1))
            metrics[label] = {"N": N, "ks": ks.statistic, "p_value": ks.p_value}
            passed &= ks.p_value >= SIGNIFICANCE

        tv_tol = context.pick(0.04, 0.02)
        mcmc_draws = context.pick(20_000, 100_000)
        sampler = MetropolisSampler(marginal, self.MCMC_L, self.MCMC_N, chains=self.MCMC_CHAINS, thin=4 * self.MCMC_L)
        rng = context.streams(1000, 1)[0].generator()
        samples = sampler.sample(rng, mcmc_draws // self.MCMC_CHAINS)
        exact_pmf = exact_max_pmf(marginal, self.MCMC_L, self.MCMC_N, context.budget)
        mcmc_tv = tv_distance(empirical_pmf(samples.max(axis=1), self.MCMC_N), exact_pmf)
        reference = exact_batch(marginal, self.MCMC_L, self.MCMC_N, context.streams(2000, mcmc_draws), keep_eta=False)
        sampler_tv = tv_distance(empirical_pmf(samples.max(axis=1), self.MCMC_N), empirical_pmf(reference.maxima, self.MCMC_N))
        metrics["mcmc"] = {"tv_vs_oracle": mcmc_tv, "tv_vs_exact_sampler": sampler_tv, "acceptance_rate": sampler.acceptance_rate}
        passed &= mcmc_tv <= tv_tol

        return self._result(passed, f"exact-sampler KS p-values and MCMC TV {mcmc_tv:.4f} (tolerance {tv_tol})", **metrics)


class DynamicsStationarityCheck(Check):
    name = "dynamics"
    criterion = 4
    description = "KMC single-site occupation vs oracle conditional marginal, chi-square at 1%"

    L, N = 32, 40
    BURN_IN_TIME = 500.0

    def run(self, context: CheckContext) -> CheckResult:
        marginal = marginal_for(STRETCHED_MODEL)
        snapshots = context.pick(2000, 10_000)
        interval = context.pick(10.0, 20.0)
        dynamics = DynamicsSpec(spec=STRETCHED_MODEL, L=self.L, hop=HopKernel.TOTALLY_ASYMMETRIC)
        rng = context.streams(0, 1)[0].generator()

        init = Configuration(eta=initial_configuration(self.L, self.N), N=self.N)
        warm = kmc_run(dynamics, init, self.BURN_IN_TIME, rng)
        run = kmc_run(dynamics, warm.configuration, interval * (snapshots - 1), rng, snapshot_interval=interval)

        # one site per snapshot, rotating around the ring
        frames = run.snapshots[:snapshots]
        values = frames[np.arange(frames.shape[0]), np.arange(frames.shape[0]) % self.L]
        expected = conditional_site_marginal(marginal, self.L, self.N, 0, context.budget)
        counts = np.bincount(values, minlength=self.N + 1)
        statistic, p_value, dof = chi_square_test(counts, expected)
        histogram_tv = tv_distance(run.histogram, expected)
        logger.info(f"KMC ran {run.events} events; chi2={statistic:.2f} on {dof} dof")
        return self._result(
            p_value >= SIGNIFICANCE,
            f"chi2 = {statistic:.2f} on {dof} dof, p = {p_value:.3g}",
            chi2=statistic,
            p_value=p_value,
            dof=dof,
            events=run.events,
            time_average_tv=histogram_tv,
        )
