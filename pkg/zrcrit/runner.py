"""Job execution behind the CLI: compute, oracle, samplers, dynamics and verify."""

import logging
import math
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import numpy as np
import scipy
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .asymptotics.regime import scale_coordinates
from .asymptotics.scales import NRule, c_lambda, resolve_N
from .checks.base import CheckContext
from .checks.engine import CheckEngine, CheckReport
from .config import ExperimentConfig, JobKind, config_hash
from .errors import InsufficientSamplesError, ZrcritError
from .formatters import (
    CheckReportTextFormatter,
    ExactLawCsvFormatter,
    JsonReportFormatter,
    ProfileCsvFormatter,
    SamplesCsvFormatter,
    StatRowsCsvFormatter,
)
from .marginal import Marginal, critical_stats
from .models import Configuration, RegimeReport, StatRow
from .oracle import conditional_site_marginal, oracle_condensed_probability, sum_distribution
from .samplers.kmc import DynamicsSpec, kmc_run
from .samplers.mcmc import MetropolisSampler, initial_configuration
from .samplers.streams import ReplicaStream, replica_streams
from .stats.batch import SampleBatch, exact_batch, merge_batches
from .stats.max_laws import max_law_tests
from .stats.observables import condensate_threshold, excess_fraction_rows, phase_mixture_test, tv_distance

logger = logging.getLogger(__name__)

DEFAULT_ENCODING = "utf-8"


class RunResult(BaseModel):
    """Files written by a job and whether it succeeded."""

    job: JobKind
    files: list[Path] = Field(default_factory=list)
    metadata: dict[str, Any] = Field(default_factory=dict)
    passed: bool = True
    summary: str = ""

    model_config = ConfigDict(arbitrary_types_allowed=True)


class _Ensemble(BaseModel):
    marginal: Marginal
    L: int
    N: int
    resolution: dict[str, Any]
    report: Optional[RegimeReport] = None

    model_config = ConfigDict(arbitrary_types_allowed=True)


def versions() -> dict[str, str]:
    return {"zrcrit": __version__, "numpy": np.__version__, "scipy": scipy.__version__, "python": platform.python_version()}


def _chunks(streams: Sequence[ReplicaStream], jobs: int) -> list[list[ReplicaStream]]:
    size = math.ceil(len(streams) / jobs)
    return [list(streams[i : i + size]) for i in range(0, len(streams), size)]


def _exact_chunk(args: tuple) -> SampleBatch:
    marginal, L, N, streams, keep_eta, block_size, budget, regime = args
    return exact_batch(marginal, L, N, streams, keep_eta=keep_eta, block_size=block_size, budget=budget, regime=regime)


def _mcmc_chunk(args: tuple) -> SampleBatch:
    marginal, L, N, streams, keep_eta, sampler, regime = args
    batches = []
    for stream in streams:
        chain = MetropolisSampler(marginal, L, N, chains=sampler.chains, burn_in=sampler.burn_in, thin=sampler.thin)
        eta = chain.sample(stream.generator(), sampler.draws)
        batches.append(
            SampleBatch.from_eta(eta, N, [stream.replica_id] * eta.shape[0], [stream.seed] * eta.shape[0], keep_eta=keep_eta, regime=regime)
        )
    return merge_batches(batches)


def _dynamics_chunk(args: tuple) -> tuple[SampleBatch, list[np.ndarray], int]:
    dynamics, init, t_end, snapshot_interval, streams, keep_eta, regime = args
    final, histograms, events = [], [], 0
    for stream in streams:
        run = kmc_run(dynamics, init, t_end, stream.generator(), snapshot_interval=snapshot_interval)
        final.append(run.configuration.eta)
        histograms.append(run.histogram)
        events += run.events
    batch = SampleBatch.from_eta(
        np.vstack(final), init.N, [s.replica_id for s in streams], [s.seed for s in streams], keep_eta=keep_eta, regime=regime
    )
    return batch, histograms, events


def _map_chunks(worker: Callable[[tuple], Any], streams: Sequence[ReplicaStream], jobs: int, make_args: Callable) -> list:
    """Run replica chunks in worker processes; results come back in chunk order."""
    chunks = _chunks(streams, jobs)
    if jobs == 1 or len(chunks) == 1:
        return [worker(make_args(chunk)) for chunk in chunks]
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(worker, [make_args(chunk) for chunk in chunks]))


def _parallel(worker: Callable[[tuple], SampleBatch], streams: Sequence[ReplicaStream], jobs: int, make_args: Callable) -> SampleBatch:
    """Run replica chunks in worker processes and merge them in replica order.

    The merged batch does not depend on the worker count.
    """
    return merge_batches(_map_chunks(worker, streams, jobs, make_args))


class ExperimentRunner:
    """Runs one configured job and writes its artifacts.

    Example:
        >>> runner = ExperimentRunner(load_config(Path("fig2.toml")))
        >>> result = runner.run()
        >>> [path.name for path in result.files]
        ['zrcrit_stats.csv', 'zrcrit_metadata.json']
    """

    def __init__(self, config: ExperimentConfig, no_color: bool = False):
        self.config = config
        self.no_color = no_color
        self.hash = config_hash(config)
        self.out_dir = Path(config.output.dir)

    def run(self) -> RunResult:
        handlers = {
            JobKind.COMPUTE: self._compute,
            JobKind.ORACLE: self._oracle,
            JobKind.SAMPLE_EXACT: self._sample_exact,
            JobKind.SAMPLE_MCMC: self._sample_mcmc,
            JobKind.DYNAMICS: self._dynamics,
            JobKind.VERIFY: self._verify,
        }
        logger.info(f"Running job {self.config.job.value} (config {self.hash[:12]}, seed {self.config.seed})")
        started = time.perf_counter()
        result = handlers[self.config.job]()
        result.metadata.update(
            {
                "job": self.config.job.value,
                "config": self.config.model_dump(mode="json"),
                "config_hash": self.hash,
                "seed": self.config.seed,
                "versions": versions(),
                "wall_time": time.perf_counter() - started,
            }
        )
        result.files.append(self._write("metadata.json", JsonReportFormatter().format(result.metadata)))
        return result

    # Helpers

    def _path(self, name: str) -> Path:
        return self.out_dir / f"{self.config.output.prefix}_{name}"

    def _write(self, name: str, text: str) -> Path:
        path = self._path(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding=DEFAULT_ENCODING)
        logger.info(f"Wrote {path}")
        return path

    def _csv(self, formatter_cls, name: str, payload) -> Path:
        return self._write(name, formatter_cls(config_hash=self.hash, seed=self.config.seed).format(payload))

    def _marginal(self) -> Marginal:
        return critical_stats(self.config.model)

    def _ensemble(self, marginal: Marginal) -> _Ensemble:
        ensemble = self.config.ensemble
        resolution = resolve_N(ensemble.rule(), marginal, ensemble.L)
        report = None
        try:
            report = scale_coordinates(marginal, ensemble.L, resolution.N, self.config.thresholds)
        except (ZrcritError, ValueError) as e:
            logger.warning(f"No regime report for L={ensemble.L}, N={resolution.N}: {e}")
        return _Ensemble(marginal=marginal, L=ensemble.L, N=resolution.N, resolution=resolution.model_dump(mode="json"), report=report)

    def _ensemble_metadata(self, ensemble: _Ensemble) -> dict[str, Any]:
        return {
            "L": ensemble.L,
            "N": ensemble.N,
            "n_rule": ensemble.resolution,
            "regime": ensemble.report.model_dump(mode="json") if ensemble.report is not None else None,
        }

    def _streams(self) -> list[ReplicaStream]:
        return replica_streams(self.config.seed, self.config.replicas)

    # Jobs

    def _compute(self) -> RunResult:
        marginal = self._marginal()
        spec = marginal.spec
        constants: dict[str, Any] = {
            "rho_c": marginal.rho_c,
            "sigma2": marginal.sigma2,
            "kappa3": marginal.kappa3,
            "A_tail": marginal.A_tail,
            "cutoff": marginal.K,
        }
        if not spec.is_power_law:
            constants["c_lambda"] = c_lambda(spec.lam, spec.b)
        metadata: dict[str, Any] = {"constants": constants}
        rows = [StatRow(statistic=name, L=0, N=0, value=value) for name, value in constants.items() if value is not None]

        if self.config.ensemble is not None:
            L = self.config.ensemble.L
            critical_rule = NRule(kind="gammal1" if spec.is_power_law else "subl", value=0.0)
            try:
                critical = resolve_N(critical_rule, marginal, L)
                constants["N_crit"] = critical.N
                constants["N_crit_real"] = critical.real_value
                rows.append(StatRow(statistic="N_crit", L=L, N=critical.N, value=critical.real_value))
            except (ZrcritError, ValueError) as e:
                logger.warning(f"No critical N at L={L}: {e}")
            if self.config.ensemble.has_N:
                ensemble = self._ensemble(marginal)
                metadata["ensemble"] = self._ensemble_metadata(ensemble)

        files = [self._csv(StatRowsCsvFormatter, "constants.csv", rows)]
        summary = ", ".join(f"{key}={value:.6g}" for key, value in constants.items() if isinstance(value, (int, float)))
        return RunResult(job=JobKind.COMPUTE, files=files, metadata=metadata, summary=summary)

    def _oracle(self) -> RunResult:
        marginal = self._marginal()
        ensemble = self._ensemble(marginal)
        budget = self.config.sampler.budget
        law = sum_distribution(marginal, ensemble.L, n_max=max(ensemble.N, 1), budget=budget)
        log_p = law.log_p(ensemble.N)
        regime = ensemble.report.case.value if ensemble.report is not None else ""
        rows = [StatRow(statistic="log_pSLN", regime=regime, L=ensemble.L, N=ensemble.N, value=log_p)]
        if ensemble.N > marginal.rho_c * ensemble.L:
            case = ensemble.report.case if ensemble.report is not None else None
            threshold = condensate_threshold(marginal, ensemble.L, ensemble.N, case)
            condensed = oracle_condensed_probability(marginal, ensemble.L, ensemble.N, threshold, budget)
            rows.append(StatRow(statistic="condensed_probability", regime=regime, L=ensemble.L, N=ensemble.N, value=condensed))
        files = [self._csv(ExactLawCsvFormatter, "exact_law.csv", law), self._csv(StatRowsCsvFormatter, "stats.csv", rows)]
        metadata = {"ensemble": self._ensemble_metadata(ensemble), "total_mass": law.total_mass()}
        return RunResult(job=JobKind.ORACLE, files=files, metadata=metadata, summary=f"log P[S_L = N] = {log_p:.10g}")

    def _sample_exact(self) -> RunResult:
        marginal = self._marginal()
        ensemble = self._ensemble(marginal)
        sampler = self.config.sampler
        keep_eta = self.config.output.profiles
        regime = ensemble.report.case.value if ensemble.report is not None else ""

        def make_args(chunk):
            return (marginal, ensemble.L, ensemble.N, chunk, keep_eta, sampler.block_size, sampler.budget, regime)

        batch = _parallel(_exact_chunk, self._streams(), self.config.jobs, make_args)
        return self._sample_outputs(JobKind.SAMPLE_EXACT, ensemble, batch)

    def _sample_mcmc(self) -> RunResult:
        marginal = self._marginal()
        ensemble = self._ensemble(marginal)
        keep_eta = self.config.output.profiles
        regime = ensemble.report.case.value if ensemble.report is not None else ""

        def make_args(chunk):
            return (marginal, ensemble.L, ensemble.N, chunk, keep_eta, self.config.sampler, regime)

        batch = _parallel(_mcmc_chunk, self._streams(), self.config.jobs, make_args)
        return self._sample_outputs(JobKind.SAMPLE_MCMC, ensemble, batch)

    def _sample_outputs(self, job: JobKind, ensemble: _Ensemble, batch: SampleBatch) -> RunResult:
        marginal = ensemble.marginal
        rows: list[StatRow] = []
        if ensemble.N != marginal.rho_c * ensemble.L:
            rows.extend(excess_fraction_rows(batch, marginal))
            if ensemble.N > marginal.rho_c * ensemble.L:
                predicted = ensemble.report.p_gamma if ensemble.report is not None else None
                rows.extend(phase_mixture_test(batch, marginal, predicted=predicted).to_rows(batch))
        if ensemble.report is not None:
            try:
                ks = max_law_tests(batch.maxima, ensemble.report, marginal, np.random.default_rng(self.config.seed))
                rows.append(ks.to_row(batch.regime, batch.L, batch.N))
            except InsufficientSamplesError as e:
                logger.info(f"Skipping the limit-law test: {e}")
            except (ZrcritError, KeyError, ValueError) as e:
                logger.warning(f"No limit-law test for case {ensemble.report.case.value}: {e}")

        files = [self._csv(SamplesCsvFormatter, "samples.csv", batch), self._csv(StatRowsCsvFormatter, "stats.csv", rows)]
        if self.config.output.profiles:
            files.append(self._csv(ProfileCsvFormatter, "profiles.csv", batch))
        metadata = {"ensemble": self._ensemble_metadata(ensemble), "records": batch.size}
        return RunResult(job=job, files=files, metadata=metadata, summary=f"{batch.size} configurations, mean M_L {batch.maxima.mean():.4g}")

    def _dynamics(self) -> RunResult:
        marginal = self._marginal()
        ensemble = self._ensemble(marginal)
        sampler = self.config.sampler
        dynamics = DynamicsSpec(spec=self.config.model, L=ensemble.L, hop=sampler.hop)
        init = Configuration(eta=initial_configuration(ensemble.L, ensemble.N), N=ensemble.N)
        regime = ensemble.report.case.value if ensemble.report is not None else ""

        def make_args(chunk):
            return (dynamics, init, sampler.t_end, sampler.snapshot_interval, chunk, self.config.output.profiles, regime)

        # one trajectory per replica; histograms are averaged over the full replica list
        results = _map_chunks(_dynamics_chunk, self._streams(), self.config.jobs, make_args)
        batch = merge_batches([chunk_batch for chunk_batch, _, _ in results])
        histogram = np.mean([h for _, chunk_histograms, _ in results for h in chunk_histograms], axis=0)
        events = sum(chunk_events for _, _, chunk_events in results)
        rows = [StatRow(statistic="events", regime=regime, L=ensemble.L, N=ensemble.N, value=float(events))]
        tv = self._occupation_tv(ensemble, histogram)
        if tv is not None:
            rows.append(StatRow(statistic="occupation_tv_vs_canonical", regime=regime, L=ensemble.L, N=ensemble.N, value=tv))
        files = [self._csv(SamplesCsvFormatter, "samples.csv", batch), self._csv(StatRowsCsvFormatter, "stats.csv", rows)]
        if self.config.output.profiles:
            files.append(self._csv(ProfileCsvFormatter, "profiles.csv", batch))
        metadata = {"ensemble": self._ensemble_metadata(ensemble), "events": events, "t_end": sampler.t_end}
        return RunResult(job=JobKind.DYNAMICS, files=files, metadata=metadata, summary=f"{events} events over {self.config.replicas} trajectories")

    def _occupation_tv(self, ensemble: _Ensemble, histogram: np.ndarray) -> Optional[float]:
        """TV distance of the time-averaged occupation histogram to P[eta_0 = j | S_L = N]."""
        try:
            reference = conditional_site_marginal(ensemble.marginal, ensemble.L, ensemble.N, site=0, budget=self.config.sampler.budget)
        except (ZrcritError, ValueError) as e:
            logger.warning(f"No canonical occupation reference at L={ensemble.L}, N={ensemble.N}: {e}")
            return None
        if reference.size != histogram.size:
            logger.warning(f"Occupation histogram has {histogram.size} bins, the canonical marginal {reference.size}; skipping the TV row")
            return None
        return tv_distance(histogram, reference)

    def _verify(self) -> RunResult:
        # verify runs without a configured seed use stream 0
        seed = self.config.seed if self.config.seed is not None else 0
        context = CheckContext(profile=self.config.verify.profile, seed=seed, budget=self.config.sampler.budget)
        report = run_checks(context, self.config.verify.checks)
        path = self._write("verify.json", JsonReportFormatter().format(report))
        text = CheckReportTextFormatter(no_color=self.no_color).format(report)
        return RunResult(job=JobKind.VERIFY, files=[path], metadata={"report": report.model_dump(mode="json")}, passed=report.passed, summary=text)


def run_checks(context: CheckContext, only: Optional[Sequence[str]] = None) -> CheckReport:
    """Run the default acceptance checks, or only the named ones."""
    return CheckEngine.with_default_checks().run_all(context, only=only)


def run(config: ExperimentConfig, no_color: bool = False) -> RunResult:
    """Run the configured job; same config and seed give byte-identical CSV files."""
    return ExperimentRunner(config, no_color=no_color).run()
