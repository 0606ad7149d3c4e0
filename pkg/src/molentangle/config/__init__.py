# src/molentangle/config/__init__.py

"""Experiment file loading, validation and resolution."""

from .config_loader import (
    find_config,
    load_and_validate_config,
    load_config,
    parse_config,
)
from .config_resolve import (
    config_section,
    resolve_experiment,
    resolve_noise,
    resolve_seed,
    resolve_setting,
)
from .config_types import (
    CombConfigSection,
    ExperimentConfigSection,
    NoiseConfigSection,
    RootConfig,
)
from .config_validate import validate_config


__all__ = [  # noqa: RUF022
    # config_loader
    "find_config",
    "load_and_validate_config",
    "load_config",
    "parse_config",
    # config_resolve
    "config_section",
    "resolve_experiment",
    "resolve_noise",
    "resolve_seed",
    "resolve_setting",
    # config_types
    "CombConfigSection",
    "ExperimentConfigSection",
    "NoiseConfigSection",
    "RootConfig",
    # config_validate
    "validate_config",
]
