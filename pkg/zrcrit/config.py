"""Experiment configuration files."""

import hashlib
import json
import sys
from enum import Enum
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .asymptotics.scales import NRule, RegimeThresholds
from .models import ModelSpec
from .oracle import DEFAULT_BUDGET
from .samplers.kmc import HopKernel

SCHEMA_VERSION = 1
UINT64_LIMIT = 1 << 64


class JobKind(str, Enum):
    """Job types, one per CLI subcommand."""

    COMPUTE = "compute"
    ORACLE = "oracle"
    SAMPLE_EXACT = "sample-exact"
    SAMPLE_MCMC = "sample-mcmc"
    DYNAMICS = "dynamics"
    VERIFY = "verify"

    @property
    def stochastic(self) -> bool:
        return self in (JobKind.SAMPLE_EXACT, JobKind.SAMPLE_MCMC, JobKind.DYNAMICS)


class EnsembleSection(BaseModel):
    """System size and particle number, given directly or by an N-rule."""

    L: int = Field(..., ge=1, description="Number of sites")
    N: Optional[int] = Field(default=None, ge=0, description="Number of particles")
    n_rule: Optional[NRule] = Field(default=None, description="Rule deriving N from L")

    model_config = ConfigDict(extra="ignore")

    @model_validator(mode="after")
    def _one_source(self) -> "EnsembleSection":
        if self.N is not None and self.n_rule is not None:
            raise ValueError("give either N or n_rule, not both")
        return self

    @property
    def has_N(self) -> bool:
        return self.N is not None or self.n_rule is not None

    def rule(self) -> NRule:
        if self.n_rule is not None:
            return self.n_rule
        if self.N is None:
            raise ValueError("ensemble has neither N nor n_rule")
        return NRule(kind="fixed", value=float(self.N))


class OutputSection(BaseModel):
    """Where artifacts go."""

    dir: Path = Field(default=Path("results"), description="Output directory")
    prefix: str = Field(default="zrcrit", min_length=1, description="File name prefix")
    profiles: bool = Field(default=False, description="Also write partial-sum profiles S_k per replica")

    model_config = ConfigDict(extra="ignore")


class SamplerSection(BaseModel):
    """Sampler and dynamics parameters."""

    burn_in: Optional[int] = Field(default=None, ge=0, description="MCMC burn-in moves (default 100 L N)")
    thin: Optional[int] = Field(default=None, ge=1, description="MCMC moves between draws (default L)")
    chains: int = Field(default=1, ge=1, description="MCMC chains per replica")
    draws: int = Field(default=1, ge=1, description="Draws per chain")
    t_end: float = Field(default=1000.0, ge=0, description="KMC simulated time")
    hop: HopKernel = Field(default=HopKernel.TOTALLY_ASYMMETRIC, description="KMC hop kernel")
    snapshot_interval: Optional[float] = Field(default=None, gt=0, description="KMC snapshot spacing")
    block_size: Optional[int] = Field(default=None, ge=2, description="Exact sampler rejection block size")
    budget: float = Field(default=DEFAULT_BUDGET, gt=0, description="Oracle work budget")

    model_config = ConfigDict(extra="ignore")


class VerifySection(BaseModel):
    profile: Literal["quick", "full"] = "quick"
    checks: Optional[list[str]] = Field(default=None, description="Run only these check ids")

    model_config = ConfigDict(extra="ignore")


class ExperimentConfig(BaseModel):
    """One experiment: a model, an ensemble and a job."""

    schema_version: Literal[1] = SCHEMA_VERSION
    job: JobKind = Field(default=JobKind.COMPUTE, description="What to run")
    model: Optional[ModelSpec] = Field(default=None, description="Jump rates")
    ensemble: Optional[EnsembleSection] = None
    replicas: int = Field(default=1, ge=1, description="Independent replicas")
    seed: Optional[int] = Field(default=None, ge=0, lt=UINT64_LIMIT, description="Root seed of all replica streams")
    jobs: int = Field(default=1, ge=1, description="Worker processes")
    output: OutputSection = Field(default_factory=OutputSection)
    thresholds: RegimeThresholds = Field(default_factory=RegimeThresholds)
    sampler: SamplerSection = Field(default_factory=SamplerSection)
    verify: VerifySection = Field(default_factory=VerifySection)

    model_config = ConfigDict(extra="ignore")

    @model_validator(mode="after")
    def _check_job(self) -> "ExperimentConfig":
        if self.job is JobKind.VERIFY:
            return self
        if self.model is None:
            raise ValueError(f"job {self.job.value} needs a model section")
        if self.job is not JobKind.COMPUTE and (self.ensemble is None or not self.ensemble.has_N):
            raise ValueError(f"job {self.job.value} needs ensemble.L and ensemble.N or ensemble.n_rule")
        if self.job.stochastic and self.seed is None:
            raise ValueError(f"job {self.job.value} is stochastic and needs a seed")
        return self


def _format_validation_error(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "config"
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)


def parse_config(data: dict[str, Any]) -> ExperimentConfig:
    """
    Validates a configuration mapping.

    Raises:
        ValueError: With dotted field paths, e.g. "ensemble.L: ..."
    """
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ValueError(f"Invalid configuration: {_format_validation_error(e)}") from e


def load_config(config_path: Path, overrides: Optional[dict[str, Any]] = None) -> ExperimentConfig:
    """
    Loads an experiment configuration from a file.

    Supports formats:
    - JSON (.json)
    - TOML (.toml), optionally under a [zrcrit] table

    Args:
        config_path: Path to the configuration file
        overrides: CLI values (seed, jobs, out) taking precedence over the file

    Returns:
        ExperimentConfig

    Raises:
        FileNotFoundError: If the file is not found
        ValueError: If the format is not supported or the file is invalid
    """
    if not config_path.exists():
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    suffix = config_path.suffix.lower()

    if suffix == ".json":
        data = _load_json_config(config_path)
    elif suffix == ".toml":
        data = _load_toml_config(config_path)
    else:
        raise ValueError(f"Unsupported configuration file format: {suffix}. Supported: .json, .toml")
    return parse_config(apply_cli_overrides(data, **(overrides or {})))


def _load_json_config(config_path: Path) -> dict[str, Any]:
    """Reads a JSON configuration mapping."""
    try:
        with open(config_path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ValueError(f"JSON parsing error in {config_path}: {e}") from e
    if not isinstance(data, dict):
        raise ValueError(f"Configuration in {config_path} must be a JSON object")
    return data


def _load_toml_config(config_path: Path) -> dict[str, Any]:
    """Reads a TOML configuration mapping."""
    if sys.version_info >= (3, 11):
        import tomllib as tomli
    else:
        try:
            import tomli
        except ImportError as e:
            raise ValueError("tomli library is required for TOML file support. Install it: pip install tomli") from e

    try:
        with open(config_path, "rb") as f:
            data = tomli.load(f)
    except tomli.TOMLDecodeError as e:
        raise ValueError(f"TOML parsing error in {config_path}: {e}") from e

    # Extract [zrcrit] section if it exists, otherwise use root level
    return data.get("zrcrit", data)


def apply_cli_overrides(
    data: dict[str, Any],
    seed: Optional[int] = None,
    jobs: Optional[int] = None,
    out: Optional[Path] = None,
    job: Optional[str] = None,
) -> dict[str, Any]:
    """
    Applies CLI values to a raw configuration mapping.

    CLI parameters take precedence over configuration.
    """
    result = dict(data)
    if seed is not None:
        result["seed"] = seed
    if jobs is not None:
        result["jobs"] = jobs
    if job is not None:
        result["job"] = job
    if out is not None:
        result["output"] = {**result.get("output", {}), "dir": str(out)}
    return result


def _canonical(config: ExperimentConfig) -> dict[str, Any]:
    return config.model_dump(mode="json", by_alias=True)


def dump_config(config: ExperimentConfig) -> str:
    """Canonical JSON text; parse_config(json.loads(dump_config(c))) == c."""
    return json.dumps(_canonical(config), sort_keys=True, indent=2)


def config_hash(config: ExperimentConfig) -> str:
    """sha256 of the canonical dump, ignoring worker count and output location."""
    data = _canonical(config)
    data.pop("jobs", None)
    data.pop("output", None)
    text = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
