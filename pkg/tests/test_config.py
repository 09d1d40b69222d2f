"""Tests for experiment configuration loading."""

import json
from pathlib import Path

import pytest

from zrcrit.config import (
    ExperimentConfig,
    JobKind,
    apply_cli_overrides,
    config_hash,
    dump_config,
    load_config,
    parse_config,
)
from zrcrit.models import Family

BASE = {
    "job": "sample-exact",
    "model": {"family": "stretched_rates", "b": 2.0, "lambda": 0.6},
    "ensemble": {"L": 64, "n_rule": {"kind": "subl", "value": 0.0}},
    "replicas": 10,
    "seed": 7,
}


def test_parse_config():
    config = parse_config(BASE)

    assert config.job is JobKind.SAMPLE_EXACT
    assert config.model.family is Family.STRETCHED_RATES
    assert config.model.lam == 0.6
    assert config.ensemble.rule().kind == "subl"
    assert config.output.prefix == "zrcrit"
    assert config.jobs == 1


def test_fixed_n_becomes_a_rule():
    config = parse_config({**BASE, "ensemble": {"L": 64, "N": 80}})

    rule = config.ensemble.rule()
    assert rule.kind == "fixed"
    assert rule.value == 80.0


def test_unknown_keys_are_ignored():
    config = parse_config({**BASE, "comment": "ignored"})

    assert not hasattr(config, "comment")


@pytest.mark.parametrize(
    "changes, message",
    [
        ({"model": None}, "needs a model"),
        ({"ensemble": {"L": 64}}, "ensemble.N or ensemble.n_rule"),
        ({"seed": None}, "needs a seed"),
        ({"ensemble": {"L": 64, "N": 80, "n_rule": {"kind": "fixed", "value": 80}}}, "not both"),
        ({"ensemble": {"L": 0, "N": 1}}, "ensemble.L"),
        ({"replicas": 0}, "replicas"),
        ({"model": {"family": "power_law_rates", "b": 5.0, "lambda": 0.5}}, "lambda = 1"),
    ],
)
def test_invalid_configurations(changes, message):
    with pytest.raises(ValueError, match="Invalid configuration") as exc_info:
        parse_config({**BASE, **changes})

    assert message in str(exc_info.value)


def test_compute_needs_no_seed_or_n():
    config = parse_config({"job": "compute", "model": BASE["model"]})

    assert config.seed is None
    assert config.ensemble is None


def test_verify_needs_no_model():
    config = parse_config({"job": "verify", "verify": {"profile": "full", "checks": ["constants"]}})

    assert config.model is None
    assert config.verify.profile == "full"
    assert config.verify.checks == ["constants"]


def test_load_json(tmp_path: Path):
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps(BASE), encoding="utf-8")

    config = load_config(path)

    assert config.replicas == 10


def test_load_toml_with_table(tmp_path: Path):
    path = tmp_path / "experiment.toml"
    path.write_text(
        """
[zrcrit]
job = "sample-mcmc"
seed = 3

[zrcrit.model]
family = "power_law_rates"
b = 5.0
lambda = 1.0

[zrcrit.ensemble]
L = 32
N = 40

[zrcrit.sampler]
chains = 2
""",
        encoding="utf-8",
    )

    config = load_config(path)

    assert config.job is JobKind.SAMPLE_MCMC
    assert config.model.family is Family.POWER_LAW_RATES
    assert config.sampler.chains == 2


def test_load_toml_at_root(tmp_path: Path):
    path = tmp_path / "experiment.toml"
    path.write_text('job = "compute"\n\n[model]\nfamily = "stretched_rates"\nb = 2.0\nlambda = 0.6\n', encoding="utf-8")

    assert load_config(path).job is JobKind.COMPUTE


def test_missing_file(tmp_path: Path):
    with pytest.raises(FileNotFoundError, match="not found"):
        load_config(tmp_path / "absent.json")


def test_unsupported_format(tmp_path: Path):
    path = tmp_path / "experiment.yaml"
    path.write_text("job: compute\n", encoding="utf-8")

    with pytest.raises(ValueError, match="Unsupported configuration file format"):
        load_config(path)


def test_bad_json(tmp_path: Path):
    path = tmp_path / "experiment.json"
    path.write_text("{not json", encoding="utf-8")

    with pytest.raises(ValueError, match="JSON parsing error"):
        load_config(path)


def test_json_must_be_an_object(tmp_path: Path):
    path = tmp_path / "experiment.json"
    path.write_text("[1, 2]", encoding="utf-8")

    with pytest.raises(ValueError, match="JSON object"):
        load_config(path)


def test_cli_overrides_take_precedence(tmp_path: Path):
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps({**BASE, "output": {"prefix": "run"}}), encoding="utf-8")

    config = load_config(path, {"seed": 99, "jobs": 4, "out": tmp_path / "out"})

    assert config.seed == 99
    assert config.jobs == 4
    assert config.output.dir == tmp_path / "out"
    assert config.output.prefix == "run"


def test_apply_cli_overrides_leaves_input_untouched():
    data = {"seed": 1}

    result = apply_cli_overrides(data, seed=2, job="verify")

    assert data == {"seed": 1}
    assert result == {"seed": 2, "job": "verify"}


def test_dump_round_trip():
    config = parse_config(BASE)

    assert parse_config(json.loads(dump_config(config))) == config


def test_config_hash_ignores_workers_and_output():
    base = parse_config(BASE)
    moved = parse_config({**BASE, "jobs": 8, "output": {"dir": "elsewhere", "prefix": "other"}})
    reseeded = parse_config({**BASE, "seed": 8})

    assert config_hash(base) == config_hash(moved)
    assert config_hash(base) != config_hash(reseeded)
    assert len(config_hash(base)) == 64


def test_defaults():
    config = ExperimentConfig(job=JobKind.VERIFY)

    assert config.verify.profile == "quick"
    assert config.sampler.budget > 0
