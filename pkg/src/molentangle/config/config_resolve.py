# src/molentangle/config/config_resolve.py

"""Merge CLI flags, the experiment file and defaults into run settings.

Precedence for every setting: CLI flag, then config file, then default.
The seed additionally falls back to ``noise.rng_seed`` before the default.
"""

import argparse
from dataclasses import fields
from pathlib import Path
from typing import Any

from apathetic_utils import cast_hint

from molentangle.campaign import ExperimentConfig, HeraldSettings, Protocol
from molentangle.constants import (
    ATOM_CARRIER_PI_US,
    COMB_CARRIER_PI_US,
    DEFAULT_BOOTSTRAP_RESAMPLES,
    DEFAULT_HERALD_CONFIRMATIONS,
    DEFAULT_HERALD_SCHEDULE,
    DEFAULT_MAX_HERALD_ATTEMPTS,
    DEFAULT_N_MAX,
    DEFAULT_OUT_DIR,
    DEFAULT_POPULATION_TRIALS,
    DEFAULT_SEED,
    DEFAULT_WORKERS,
)
from molentangle.logs import getAppLogger
from molentangle.noise import NoiseConfig
from molentangle.presets import PRESET_POPULATION_TRIALS, get_preset
from molentangle.protocols import PulseDurations, QubitKind

from .config_types import RootConfig


_PRESET_PROTOCOLS = {"low": Protocol.PARITY_SCAN_L, "high": Protocol.PARITY_SCAN_H}


def config_section(root_cfg: RootConfig | None, name: str) -> dict[str, Any]:
    if not root_cfg:
        return {}
    section: object = root_cfg.get(name)
    if isinstance(section, dict):
        return cast_hint(dict[str, Any], section)
    return {}


def resolve_setting(
    args: argparse.Namespace | None,
    dest: str,
    section: dict[str, Any],
    key: str,
    default: Any,
) -> Any:
    """One setting by precedence; ``None`` on the CLI means "not given"."""
    logger = getAppLogger()
    cli_value: object = getattr(args, dest, None) if args is not None else None
    if cli_value is not None:
        logger.trace("[resolve_setting] Using CLI flag: %s=%r", key, cli_value)
        return cli_value
    if key in section:
        logger.trace("[resolve_setting] Using config: %s=%r", key, section[key])
        return section[key]
    logger.trace("[resolve_setting] Using default: %s=%r", key, default)
    return default


def resolve_seed(root_cfg: RootConfig | None, args: argparse.Namespace | None) -> int:
    """--seed, then experiment.seed, then noise.rng_seed, then the default."""
    experiment = config_section(root_cfg, "experiment")
    noise = config_section(root_cfg, "noise")
    fallback = int(noise.get("rng_seed", DEFAULT_SEED))
    return int(resolve_setting(args, "seed", experiment, "seed", fallback))


def resolve_noise(root_cfg: RootConfig | None) -> NoiseConfig:
    """NoiseConfig from [noise]; keys it does not know are dropped."""
    known = {f.name for f in fields(NoiseConfig)}
    section = {
        k: v for k, v in config_section(root_cfg, "noise").items() if k in known
    }
    if "herald_prior" in section:
        section["herald_prior"] = tuple(float(p) for p in section["herald_prior"])
    for key, value in section.items():
        if isinstance(value, int) and key not in ("detect_threshold", "rng_seed"):
            section[key] = float(value)
    return NoiseConfig(**section)


def _resolve_protocol(
    experiment: dict[str, Any],
    preset: str | None,
    args: argparse.Namespace | None,
) -> Protocol:
    name = resolve_setting(args, "protocol", experiment, "protocol", None)
    if name is None and preset is not None:
        return _PRESET_PROTOCOLS[preset]
    if name is None:
        msg = "No protocol given (set experiment.protocol, --protocol or --preset)"
        raise ValueError(msg)
    return Protocol(name)


def resolve_experiment(
    root_cfg: RootConfig | None,
    *,
    args: argparse.Namespace | None = None,
    cwd: Path | None = None,
) -> ExperimentConfig:
    """Build the validated ``ExperimentConfig`` for a simulate run."""
    if cwd is None:
        cwd = Path.cwd().resolve()
    experiment = config_section(root_cfg, "experiment")

    preset_name: str | None = resolve_setting(
        args, "preset", experiment, "preset", None
    )
    protocol = _resolve_protocol(experiment, preset_name, args)

    phi_a = tuple(float(p) for p in experiment.get("phi_a", ()))
    targets = tuple(int(t) for t in experiment.get("targets", ()))
    default_trials = DEFAULT_POPULATION_TRIALS
    if preset_name is not None:
        preset = get_preset(preset_name)
        if not phi_a:
            phi_a, targets = preset.phi_a, preset.targets
        default_trials = PRESET_POPULATION_TRIALS[preset_name]

    out_dir = Path(
        resolve_setting(args, "out", experiment, "out_dir", DEFAULT_OUT_DIR)
    )
    if not out_dir.is_absolute():
        out_dir = cwd / out_dir

    herald = HeraldSettings(
        max_attempts=int(
            experiment.get("herald_max_attempts", DEFAULT_MAX_HERALD_ATTEMPTS)
        ),
        confirmations=int(
            experiment.get("herald_confirmations", DEFAULT_HERALD_CONFIRMATIONS)
        ),
        schedule=tuple(experiment.get("herald_schedule", DEFAULT_HERALD_SCHEDULE)),
    )
    durations = PulseDurations(
        atom_carrier_pi_us=float(
            experiment.get("atom_carrier_pi_us", ATOM_CARRIER_PI_US)
        ),
        comb_pi_us=float(experiment.get("comb_pi_us", COMB_CARRIER_PI_US)),
    )
    budget = resolve_setting(args, "budget", experiment, "budget", None)

    cfg = ExperimentConfig(
        protocol=protocol,
        noise=resolve_noise(root_cfg),
        phi_a=phi_a,
        targets=targets,
        trials=int(
            resolve_setting(args, "trials", experiment, "trials", default_trials)
        ),
        seed=resolve_seed(root_cfg, args),
        n_max=int(experiment.get("n_max", DEFAULT_N_MAX)),
        out_dir=out_dir,
        herald=herald,
        durations=durations,
        budget=None if budget is None else int(budget),
        sequence=tuple(experiment.get("sequence", ())),
        qubit=QubitKind(experiment.get("qubit", QubitKind.LOW.value)),
        workers=int(
            resolve_setting(args, "workers", experiment, "workers", DEFAULT_WORKERS)
        ),
        bootstrap_resamples=int(
            experiment.get("bootstrap_resamples", DEFAULT_BOOTSTRAP_RESAMPLES)
        ),
    )
    getAppLogger().debug(
        "Resolved %s: %d phase point(s), trials=%d, seed=%d, out=%s",
        cfg.protocol.value,
        len(cfg.phi_a),
        cfg.trials,
        cfg.seed,
        cfg.out_dir,
    )
    return cfg
