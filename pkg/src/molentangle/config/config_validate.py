# src/molentangle/config/config_validate.py

"""Experiment file validation using apathetic-schema."""

import math
from typing import Any

from apathetic_schema import (
    check_schema_conformance,
    collect_msg,
    flush_schema_aggregators,
)
from apathetic_schema.types import ApatheticSchema_ValidationSummary
from apathetic_schema.warn_keys_once import ApatheticSchema_SchemaErrorAggregator
from apathetic_utils import cast_hint, schema_from_typeddict

from molentangle.constants import DEFAULT_STRICT_CONFIG, MAX_SEED, MIN_N_MAX
from molentangle.logs import getAppLogger

from .config_types import RootConfig


ValidationSummary = ApatheticSchema_ValidationSummary
SchemaErrorAggregator = ApatheticSchema_SchemaErrorAggregator

Section = dict[str, Any]


FIELD_EXAMPLES: dict[str, str] = {
    "root.experiment.protocol": '"parity_scan_L"',
    "root.experiment.preset": '"low"',
    "root.experiment.phi_a": "[0.0, 0.5235987755982988]",
    "root.experiment.targets": "[246, 39]",
    "root.experiment.trials": "202",
    "root.experiment.seed": "12345",
    "root.experiment.n_max": "8",
    "root.experiment.out_dir": '"out"',
    "root.experiment.budget": "20000",
    "root.experiment.workers": "4",
    "root.experiment.qubit": '"low"',
    "root.experiment.sequence": '["mol_sideband 0.5 0.0", "atom_sideband 1 0.0"]',
    "root.experiment.herald_schedule": '["minus52", "minus32"]',
    "root.noise.nbar_m": "0.05",
    "root.noise.atom_coherence_us": "1000.0",
    "root.noise.prep_error": "0.02",
    "root.noise.herald_prior": "[0.5, 0.5, 0.0]",
    "root.noise.detect_threshold": "6",
    "root.comb.f_rep_hz": '"78995979.44"',
    "root.comb.f_aom_hz": "165000000",
    "root.comb.n": "10825",
    "root.comb.sign": "-1",
    "root.comb.rotational_constant_hz": "142500000000",
}

PROBABILITY_FIELDS = ("prep_error", "leak_per_pulse", "leak_per_trial")
POSITIVE_FIELDS = ("atom_coherence_us", "comb_coherence_us")
SCAN_PROTOCOLS = ("parity_scan_L", "parity_scan_H")
PRIOR_ENTRIES = 3


def _is_number(value: object) -> bool:
    return isinstance(value, int | float) and not isinstance(value, bool)


def _validate_probability(name: str, value: object) -> tuple[bool, str]:
    if not _is_number(value):
        return True, ""  # type errors come from the schema check
    if not 0.0 <= float(value) <= 1.0:  # type: ignore[arg-type]
        return False, f"Field 'noise.{name}' must be in [0, 1] (got {value})"
    return True, ""


def _validate_herald_prior(prior: object) -> tuple[bool, str]:
    if not isinstance(prior, list):
        return True, ""
    entries = cast_hint(list[object], prior)
    if len(entries) != PRIOR_ENTRIES or not all(_is_number(p) for p in entries):
        return False, "Field 'noise.herald_prior' needs three numbers"
    values = [float(p) for p in entries]  # type: ignore[arg-type]
    if any(p < 0 for p in values):
        return False, "Field 'noise.herald_prior' entries must be non-negative"
    if not math.isclose(sum(values), 1.0, abs_tol=1e-9):
        return False, f"Field 'noise.herald_prior' must sum to 1 (got {sum(values)})"
    return True, ""


def _validate_phase_schedule(experiment: Section) -> list[str]:
    errors: list[str] = []
    phi_a = experiment.get("phi_a")
    targets = experiment.get("targets")
    if isinstance(phi_a, list) != isinstance(targets, list):
        errors.append("Fields 'experiment.phi_a' and 'experiment.targets' go together")
        return errors
    if not isinstance(phi_a, list) or not isinstance(targets, list):
        return errors
    phases = cast_hint(list[object], phi_a)
    counts = cast_hint(list[object], targets)
    if len(phases) != len(counts):
        errors.append(
            f"Fields 'experiment.phi_a' ({len(phases)} entries) and "
            f"'experiment.targets' ({len(counts)} entries) differ in length"
        )
    if any(isinstance(t, int) and t <= 0 for t in counts):
        errors.append("Field 'experiment.targets' entries must be positive")
    if len(set(map(repr, phases))) != len(phases):
        errors.append("Field 'experiment.phi_a' entries must be distinct")
    return errors


def _validate_experiment(experiment: Section) -> list[str]:
    errors = _validate_phase_schedule(experiment)

    n_max = experiment.get("n_max")
    if isinstance(n_max, int) and n_max < MIN_N_MAX:
        errors.append(f"Field 'experiment.n_max' must be at least {MIN_N_MAX}")

    seed = experiment.get("seed")
    if isinstance(seed, int) and not 0 <= seed <= MAX_SEED:
        errors.append("Field 'experiment.seed' must fit in 64 unsigned bits")

    for name in ("trials", "budget", "workers", "herald_max_attempts"):
        value = experiment.get(name)
        if isinstance(value, int) and value < 1:
            errors.append(f"Field 'experiment.{name}' must be at least 1")

    protocol = experiment.get("protocol")
    has_schedule = "phi_a" in experiment or "preset" in experiment
    if protocol in SCAN_PROTOCOLS and not has_schedule:
        errors.append(
            f"Protocol '{protocol}' needs 'experiment.phi_a'/'targets' "
            "or 'experiment.preset'"
        )
    if protocol == "custom" and not experiment.get("sequence"):
        errors.append("Protocol 'custom' needs a non-empty 'experiment.sequence'")
    return errors


def _validate_noise(noise: Section) -> list[str]:
    errors: list[str] = []
    for name in PROBABILITY_FIELDS:
        if name in noise:
            ok, msg = _validate_probability(name, noise[name])
            if not ok:
                errors.append(msg)
    for name in POSITIVE_FIELDS:
        value = noise.get(name)
        if _is_number(value) and not float(value) > 0:  # type: ignore[arg-type]
            errors.append(f"Field 'noise.{name}' must be positive (got {value})")
    nbar = noise.get("nbar_m")
    if _is_number(nbar) and float(nbar) < 0:  # type: ignore[arg-type]
        errors.append(f"Field 'noise.nbar_m' must be non-negative (got {nbar})")
    if "herald_prior" in noise:
        ok, msg = _validate_herald_prior(noise["herald_prior"])
        if not ok:
            errors.append(msg)
    seed = noise.get("rng_seed")
    if isinstance(seed, int) and not 0 <= seed <= MAX_SEED:
        errors.append("Field 'noise.rng_seed' must fit in 64 unsigned bits")
    return errors


def _validate_comb(comb: Section) -> list[str]:
    errors: list[str] = []
    sign = comb.get("sign")
    if isinstance(sign, int) and sign not in (-1, 1):
        errors.append(f"Field 'comb.sign' must be +1 or -1 (got {sign})")
    n = comb.get("n")
    if isinstance(n, int) and n <= 0:
        errors.append(f"Field 'comb.n' must be positive (got {n})")
    for name in ("n_tolerance", "rotational_tolerance"):
        value = comb.get(name)
        if _is_number(value) and not float(value) > 0:  # type: ignore[arg-type]
            errors.append(f"Field 'comb.{name}' must be positive (got {value})")
    return errors


# ---------------------------------------------------------------------------
# main validator
# ---------------------------------------------------------------------------


def _set_valid_and_return(
    *,
    flush: bool = True,
    summary: ValidationSummary,  # could be modified
    agg: SchemaErrorAggregator,  # could be modified
) -> ValidationSummary:
    if flush:
        flush_schema_aggregators(summary=summary, agg=agg)
    summary.valid = not summary.errors and not summary.strict_warnings
    return summary


def _section(parsed_cfg: dict[str, Any], name: str) -> Section:
    value = parsed_cfg.get(name)
    if isinstance(value, dict):
        return cast_hint(Section, value)
    return {}


def _validate_custom_rules(
    parsed_cfg: dict[str, Any],
    *,
    summary: ValidationSummary,  # modified
) -> None:
    """Range and consistency rules the schema cannot express; all are errors."""
    logger = getAppLogger()
    logger.trace("[validate_custom] Applying custom validation rules")

    errors = [
        *_validate_experiment(_section(parsed_cfg, "experiment")),
        *_validate_noise(_section(parsed_cfg, "noise")),
        *_validate_comb(_section(parsed_cfg, "comb")),
    ]
    for error_msg in errors:
        collect_msg(error_msg, strict=True, summary=summary, is_error=True)


def validate_config(
    parsed_cfg: dict[str, Any],
    *,
    strict: bool | None = None,
) -> ValidationSummary:
    """Validate a parsed experiment file.

    Unknown keys are errors in strict mode (the default) and warnings
    otherwise; range rules are always errors.
    """
    logger = getAppLogger()
    logger.trace(f"[validate_config] Starting validation (strict={strict})")

    strict_config = strict if strict is not None else DEFAULT_STRICT_CONFIG
    summary = ValidationSummary(
        valid=True,
        errors=[],
        strict_warnings=[],
        warnings=[],
        strict=strict_config,
    )
    agg: SchemaErrorAggregator = {}

    root_schema = schema_from_typeddict(RootConfig)
    ok = check_schema_conformance(
        parsed_cfg,
        root_schema,
        "in experiment file",
        strict_config=strict_config,
        summary=summary,
        base_path="root",
        field_examples=FIELD_EXAMPLES,
    )
    if not ok and not (summary.errors or summary.strict_warnings):
        collect_msg(
            "Experiment file invalid.",
            strict=True,
            summary=summary,
            is_error=True,
        )

    _validate_custom_rules(parsed_cfg, summary=summary)
    return _set_valid_and_return(summary=summary, agg=agg)
