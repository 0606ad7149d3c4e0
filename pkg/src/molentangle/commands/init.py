# src/molentangle/commands/init.py

"""Handle the init subcommand."""

import argparse
from pathlib import Path

from molentangle.constants import EXIT_FAILURE, EXIT_OK
from molentangle.logs import getAppLogger
from molentangle.meta import PROGRAM_CONFIG


# Default configuration template
DEFAULT_CONFIG_TEMPLATE = """\
# Experiment file. Every key is optional; CLI flags override these values.

[experiment]
# prepare | psi_L | psi_H | parity_scan_L | parity_scan_H
# | population_L | population_H | custom
protocol = "parity_scan_L"

# Fill phi_a/targets from a published schedule ("low" or "high"),
# or list them yourself:
preset = "low"
# phi_a = [0.0, 0.5235987755982988, 1.0471975511965976]
# targets = [50, 50, 50]

# Trials for non-scan protocols
trials = 202

seed = 12345
n_max = 8
out_dir = "out"

# Global row budget (default: 10x the planned trials)
# budget = 20000

# Worker processes for independent trials and bootstrap resamples
workers = 1
bootstrap_resamples = 1000

# Heralded preparation
herald_max_attempts = 50
herald_confirmations = 1
herald_schedule = ["minus52", "minus32"]

# Pulse strings for the custom protocol: "<selector> <theta/pi> <phi rad> [us]"
# qubit = "low"
# sequence = ["mol_sideband 0.5 0.0", "atom_sideband 1 0.0"]

[noise]
nbar_m = 0.05
atom_coherence_us = 1000.0
comb_coherence_us = 3000.0
prep_error = 0.0
leak_per_pulse = 0.0
leak_per_trial = 0.0
detect_bright_mean = 20.0
detect_dark_mean = 0.4
detect_threshold = 6
# P(-3/2), P(-5/2), P(leaked) of the molecule before heralding
herald_prior = [0.5, 0.5, 0.0]

[comb]
# Strings keep exact decimals or fractions
f_rep_hz = "855131477587/10825"
f_aom_hz = 165000000
n = 10825
sign = -1
rotational_constant_hz = 142500000000
rotational_tolerance = 0.01
"""


def handle_init_command(args: argparse.Namespace) -> int:
    """Write a commented experiment file template."""
    logger = getAppLogger()

    config_arg = getattr(args, "config", None)
    config_path = (
        Path(config_arg).expanduser()
        if config_arg
        else Path.cwd() / f".{PROGRAM_CONFIG}.toml"
    )

    if config_path.exists() and not getattr(args, "force", False):
        logger.error(
            "Configuration file already exists: %s (use --force to overwrite)",
            config_path,
        )
        return EXIT_FAILURE

    try:
        config_path.parent.mkdir(parents=True, exist_ok=True)
        config_path.write_text(DEFAULT_CONFIG_TEMPLATE, encoding="utf-8")
    except OSError as e:
        logger.errorIfNotDebug("Failed to write %s: %s", config_path, e)
        return EXIT_FAILURE

    logger.info("Created configuration file: %s", config_path)
    return EXIT_OK
