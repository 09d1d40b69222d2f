"""CLI interface for zrcrit."""

import io
import logging
import sys
import traceback
from pathlib import Path
from typing import Optional

# UTF-8 setup for Windows (for correct output)
if sys.platform == "win32":
    try:
        if hasattr(sys.stdout, "buffer"):
            sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding="utf-8", errors="replace")
        if hasattr(sys.stderr, "buffer"):
            sys.stderr = io.TextIOWrapper(sys.stderr.buffer, encoding="utf-8", errors="replace")
    except (AttributeError, OSError):
        pass

import click

from . import __version__
from .config import ExperimentConfig, JobKind, apply_cli_overrides, load_config, parse_config
from .errors import ZrcritError
from .runner import RunResult, run

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING, format=LOG_FORMAT, force=True)


def _load(config_path: Optional[str], job: Optional[JobKind], seed: Optional[int], jobs: Optional[int], out: Optional[str]) -> ExperimentConfig:
    """
    Loads the configuration file, or an empty one, with CLI values applied.

    Raises:
        FileNotFoundError: If the configuration file does not exist
        ValueError: If the configuration is invalid
    """
    overrides = {"seed": seed, "jobs": jobs, "out": Path(out) if out else None, "job": job.value if job else None}
    if config_path:
        config = load_config(Path(config_path), overrides=overrides)
        logger.info(f"Configuration loaded from {config_path}")
        return config
    return parse_config(apply_cli_overrides({}, **overrides))


def _report(result: RunResult) -> None:
    if result.summary:
        click.echo(result.summary)
    for path in result.files:
        click.echo(f"✅ Wrote {path}", err=True)


def _execute(
    config_path: Optional[str],
    job: Optional[JobKind],
    seed: Optional[int],
    jobs: Optional[int],
    out: Optional[str],
    verbose: bool,
    no_color: bool = False,
    verify: Optional[dict] = None,
) -> None:
    """Load, run, report and exit: 0 on success, 1 on errors or failed checks, 130 on interrupt."""
    _setup_logging(verbose)
    try:
        config = _load(config_path, job, seed, jobs, out)
        if verify:
            config = config.model_copy(update={"verify": config.verify.model_copy(update=verify)})
        result = run(config, no_color=no_color)
    except KeyboardInterrupt:
        click.echo("\n⚠️  Interrupted by user", err=True)
        sys.exit(130)
    except FileNotFoundError as e:
        click.echo(f"❌ {e}", err=True)
        sys.exit(1)
    except (ZrcritError, ValueError, RuntimeError) as e:
        click.echo(f"❌ {e}", err=True)
        logger.error(f"Job failed: {e}", exc_info=verbose)
        sys.exit(1)
    except Exception as e:
        click.echo(f"❌ Unexpected error: {e}", err=True)
        if verbose:
            click.echo("\nFull traceback:", err=True)
            traceback.print_exc()
        else:
            click.echo("💡 Use --verbose for detailed information", err=True)
        sys.exit(1)

    _report(result)
    if not result.passed:
        click.echo("❌ Some checks failed", err=True)
        sys.exit(1)
    sys.exit(0)


def common_options(config_required: bool = True):
    """--config, --seed, --jobs, --out and --verbose, shared by every job command."""

    def decorator(func):
        options = [
            click.option(
                "--config",
                "config_path",
                type=click.Path(exists=False, dir_okay=False),
                required=config_required,
                help="Path to configuration file (.json or .toml)",
            ),
            click.option("--seed", type=click.IntRange(0, (1 << 64) - 1), help="Root seed (overrides the configuration)"),
            click.option("--jobs", type=click.IntRange(min=1), help="Worker processes (overrides the configuration)"),
            click.option("--out", type=click.Path(file_okay=False), help="Output directory (overrides the configuration)"),
            click.option("--verbose", "-v", is_flag=True, help="Debug logging"),
        ]
        for option in reversed(options):
            func = option(func)
        return func

    return decorator


@click.group()
@click.version_option(version=__version__, prog_name="zrcrit")
def cli():
    """zrcrit - condensation of zero-range processes at criticality."""
    pass


@cli.command("run")
@common_options()
def run_command(config_path, seed, jobs, out, verbose):
    """Run the job named in the configuration file."""
    _execute(config_path, None, seed, jobs, out, verbose)


@cli.command()
@common_options()
def compute(config_path, seed, jobs, out, verbose):
    """
    Compute critical constants and the regime of (L, N).

    Emits rho_c, sigma^2, c_lambda, the critical N and the regime report.
    """
    _execute(config_path, JobKind.COMPUTE, seed, jobs, out, verbose)


@cli.command()
@common_options()
def oracle(config_path, seed, jobs, out, verbose):
    """Exact law of S_L and log P[S_L = N]."""
    _execute(config_path, JobKind.ORACLE, seed, jobs, out, verbose)


@cli.command("sample-exact")
@common_options()
def sample_exact(config_path, seed, jobs, out, verbose):
    """Exact samples of the canonical measure, one per replica."""
    _execute(config_path, JobKind.SAMPLE_EXACT, seed, jobs, out, verbose)


@cli.command("sample-mcmc")
@common_options()
def sample_mcmc(config_path, seed, jobs, out, verbose):
    """Metropolis samples of the canonical measure."""
    _execute(config_path, JobKind.SAMPLE_MCMC, seed, jobs, out, verbose)


@cli.command()
@common_options()
def dynamics(config_path, seed, jobs, out, verbose):
    """Kinetic Monte Carlo trajectories of the zero-range process."""
    _execute(config_path, JobKind.DYNAMICS, seed, jobs, out, verbose)


@cli.command()
@common_options(config_required=False)
@click.option("--profile", type=click.Choice(["quick", "full"]), default=None, help="Check sizes (default: quick)")
@click.option("--check", "checks", multiple=True, help="Run only this check (can be specified multiple times)")
@click.option("--no-color", is_flag=True, help="Disable colored output (useful for CI)")
def verify(config_path, seed, jobs, out, verbose, profile, checks, no_color):
    """
    Run the acceptance checks.

    Exits with code 1 when any check fails.
    """
    updates = {}
    if profile:
        updates["profile"] = profile
    if checks:
        updates["checks"] = list(checks)
    _execute(config_path, JobKind.VERIFY, seed, jobs, out, verbose, no_color=no_color, verify=updates)


def main():
    """CLI entry point."""
    cli()


if __name__ == "__main__":
    main()
