"""
Command-line entry point: ``skewbench <experiment> --config PATH``.

Exit codes: 0 when every check passed, 2 when a check failed, 1 on an
execution or configuration error.
"""
import logging
import sys
from pathlib import Path
from typing import Optional, Tuple

import click
from pydantic import ValidationError

from skewbench import __version__
from skewbench.config.settings import settings
from skewbench.exceptions import SkewBenchError
from skewbench.models.experiment import ExperimentConfig, ExperimentName
from skewbench.services.experiments import run_experiment
from skewbench.services.logging import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CHECKS_FAILED = 2


def load_config(
    experiment: str, config_path: Optional[Path], seeds: Tuple[int, ...]
) -> ExperimentConfig:
    overrides = {"experiment": experiment}
    if seeds:
        overrides["seeds"] = list(seeds)
    if config_path is None:
        return ExperimentConfig.model_validate(overrides)
    return ExperimentConfig.from_json_file(config_path, overrides)


@click.command(context_settings={"help_option_names": ["-h", "--help"]})
@click.argument("experiment", type=click.Choice([e.value for e in ExperimentName]))
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="JSON experiment configuration; defaults apply when omitted.",
)
@click.option("--seed", "seeds", type=int, multiple=True, help="Seed to run (repeatable).")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), help="Output root.")
@click.option("--workers", type=click.IntRange(min=1), help="Threads for tree training.")
@click.option("--log-level", default=None, help="Overrides SKEWBENCH_LOG_LEVEL.")
@click.option("--json-logs/--plain-logs", default=None, help="Overrides SKEWBENCH_LOG_JSON.")
@click.version_option(__version__, prog_name="skewbench")
def main(
    experiment: str,
    config_path: Optional[Path],
    seeds: Tuple[int, ...],
    out: Optional[Path],
    workers: Optional[int],
    log_level: Optional[str],
    json_logs: Optional[bool],
) -> None:
    """Run one evaluation-bias experiment and write its results."""
    setup_logging(
        level=log_level or settings.LOG_LEVEL,
        json_format=settings.LOG_JSON if json_logs is None else json_logs,
        log_file=settings.LOG_FILE,
    )
    if workers is not None:
        settings.WORKERS = workers

    try:
        config = load_config(experiment, config_path, seeds)
    except (ValidationError, ValueError, OSError) as e:
        click.echo(f"invalid configuration: {e}", err=True)
        sys.exit(EXIT_ERROR)

    try:
        summary = run_experiment(config, out)
    except (SkewBenchError, OSError) as e:
        logger.error("Experiment failed", extra={"experiment": experiment, "error": str(e)})
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_ERROR)

    click.echo(f"results: {summary.output_dir}")
    for notice in summary.notices:
        click.echo(f"notice: {notice}")
    for check in summary.checks:
        status = "PASS" if check.passed else "FAIL"
        click.echo(f"{status} {check.name}: {check.passes}/{check.trials} (need {check.required})")

    sys.exit(EXIT_OK if summary.all_passed else EXIT_CHECKS_FAILED)


if __name__ == "__main__":
    main()
