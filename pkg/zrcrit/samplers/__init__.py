"""Samplers for the canonical measure and the zero-range dynamics."""

from .exact import ExactSampler, exact_conditional_sample
from .kmc import DynamicsSpec, HopKernel, KmcResult, RateTree, kmc_run
from .mcmc import MetropolisSampler, log_acceptance, mcmc_conditional_sample
from .streams import ReplicaStream, replica_streams
from .tilted import TiltedMarginal, TiltedRejectionSampler, solve_tilt, tilt, tilted_max_cdf, tilted_rejection_sample

__all__ = [
    "DynamicsSpec",
    "ExactSampler",
    "HopKernel",
    "KmcResult",
    "MetropolisSampler",
    "RateTree",
    "ReplicaStream",
    "TiltedMarginal",
    "TiltedRejectionSampler",
    "exact_conditional_sample",
    "kmc_run",
    "log_acceptance",
    "mcmc_conditional_sample",
    "replica_streams",
    "solve_tilt",
    "tilt",
    "tilted_max_cdf",
    "tilted_rejection_sample",
]
