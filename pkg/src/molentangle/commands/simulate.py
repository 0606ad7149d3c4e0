# src/molentangle/commands/simulate.py

"""Handle the simulate subcommand."""

import argparse
from pathlib import Path

from molentangle.campaign import run_campaign
from molentangle.config import load_and_validate_config, resolve_experiment
from molentangle.constants import (
    EXIT_BUDGET_EXHAUSTED,
    EXIT_CONFIG_ERROR,
    EXIT_FAILURE,
    EXIT_NUMERIC_ERROR,
    EXIT_OK,
)
from molentangle.logs import getAppLogger


def handle_simulate_command(args: argparse.Namespace) -> int:
    """Run the configured campaign and write its output tree."""
    logger = getAppLogger()
    cwd = Path.cwd().resolve()

    try:
        result = load_and_validate_config(
            getattr(args, "config", None),
            cwd=cwd,
            strict=getattr(args, "strict", None),
        )
        root_cfg = result[1] if result is not None else None
        if result is None:
            logger.debug("No experiment file; using CLI flags and defaults")
        cfg = resolve_experiment(root_cfg, args=args, cwd=cwd)
    except (FileNotFoundError, ValueError, TypeError) as e:
        logger.errorIfNotDebug(str(e))
        return EXIT_CONFIG_ERROR

    try:
        summary = run_campaign(cfg)
    except ArithmeticError as e:
        logger.errorIfNotDebug("Numeric error: %s", e)
        return EXIT_NUMERIC_ERROR
    except (ValueError, RuntimeError, OSError) as e:
        logger.errorIfNotDebug(str(e))
        return EXIT_FAILURE
    except Exception as e:  # noqa: BLE001
        logger.criticalIfNotDebug("Unexpected error: %s", e)
        return EXIT_FAILURE

    logger.brief(
        "%s: %d valid / %d rows written to %s",
        summary.protocol.value,
        summary.valid_trials,
        summary.total_rows,
        cfg.out_dir,
    )
    for line in summary.lines():
        logger.detail(line)

    if summary.budget_exhausted:
        logger.warning(
            "Trial budget of %d rows exhausted; results are partial", summary.budget
        )
        return EXIT_BUDGET_EXHAUSTED
    return EXIT_OK
