# src/molentangle/commands/validate.py

"""Handle the validate subcommand."""

import argparse
from pathlib import Path

from molentangle.config import load_and_validate_config, resolve_experiment
from molentangle.config.config_loader import CANDIDATE_NAMES
from molentangle.constants import EXIT_CONFIG_ERROR, EXIT_FAILURE, EXIT_OK
from molentangle.logs import getAppLogger


def handle_validate_command(args: argparse.Namespace) -> int:
    """Check an experiment file without running anything.

    Beyond the schema, the file must also resolve into a runnable
    experiment when it names a protocol or preset.
    """
    logger = getAppLogger()
    cwd = Path.cwd().resolve()

    try:
        result = load_and_validate_config(
            getattr(args, "config", None),
            cwd=cwd,
            strict=getattr(args, "strict", None),
        )
        if result is None:
            logger.error(
                "No configuration file found. Looking for %s",
                ", ".join(CANDIDATE_NAMES),
            )
            return EXIT_FAILURE

        config_path, root_cfg, _validation = result
        experiment = root_cfg.get("experiment", {})
        if "protocol" in experiment or "preset" in experiment:
            cfg = resolve_experiment(root_cfg, cwd=cwd)
            logger.detail(
                "Resolved %s with %d phase point(s)",
                cfg.protocol.value,
                len(cfg.phi_a),
            )
        logger.brief("%s is valid", config_path.name)
    except (FileNotFoundError, ValueError, TypeError) as e:
        logger.errorIfNotDebug(str(e))
        return EXIT_CONFIG_ERROR
    except Exception as e:  # noqa: BLE001
        logger.criticalIfNotDebug("Unexpected error: %s", e)
        return EXIT_FAILURE
    return EXIT_OK
