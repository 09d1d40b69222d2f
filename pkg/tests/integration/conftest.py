"""Fixtures for integration tests."""

import json
import subprocess
import sys
from collections.abc import Callable
from pathlib import Path

import pytest

CLI_TIMEOUT = 300


@pytest.fixture
def experiment_file(tmp_path: Path) -> Callable[..., Path]:
    """Writes a JSON experiment configuration into tmp_path and returns its path."""

    def write(name: str = "experiment.json", **values) -> Path:
        data = {
            "model": {"family": "stretched_rates", "b": 2.0, "lambda": 0.6},
            "ensemble": {"L": 64, "n_rule": {"kind": "subl", "value": 0.0}},
            "replicas": 8,
            "seed": 2024,
            "output": {"dir": str(tmp_path / "results"), "prefix": "it"},
            **values,
        }
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    return write


@pytest.fixture
def zrcrit_cli() -> Callable[..., subprocess.CompletedProcess]:
    """Runs `python -m zrcrit.cli` in a subprocess."""

    def invoke(*args: str) -> subprocess.CompletedProcess:
        try:
            return subprocess.run(
                [sys.executable, "-m", "zrcrit.cli", *args],
                capture_output=True,
                text=True,
                encoding="utf-8",
                timeout=CLI_TIMEOUT,
            )
        except subprocess.TimeoutExpired:
            pytest.skip("CLI command is not responding")

    return invoke
