# src/molentangle/commands/comb.py

"""Handle the comb subcommand."""

import argparse
from pathlib import Path
from typing import Any

from molentangle.comb import (
    CombParams,
    RotationalCheck,
    RotationalModel,
    ToothRecovery,
    check_rotational_consistency,
    comb_report_lines,
    determine_transition,
    format_hz,
    raman_frequency,
    recover_n,
)
from molentangle.config import (
    RootConfig,
    config_section,
    load_and_validate_config,
    resolve_seed,
    resolve_setting,
)
from molentangle.constants import (
    COMB_CARRIER_PI_US,
    DEFAULT_COMB_SIGN,
    DEFAULT_DELTA_F_REP_HZ,
    DEFAULT_N_TOLERANCE,
    DEFAULT_ROTATIONAL_CONSTANT_HZ,
    DEFAULT_ROTATIONAL_TOLERANCE,
    DEFAULT_SCAN_POINTS,
    DEFAULT_SCAN_SHOTS,
    EXIT_CONFIG_ERROR,
    EXIT_FAILURE,
    EXIT_OK,
)
from molentangle.logs import getAppLogger
from molentangle.utils import Stream, trial_rng

from .fit import write_report


def _comb_lines(args: argparse.Namespace, comb: dict[str, Any]) -> list[str]:
    """Raman frequency, tooth recovery and rotational check from given values."""

    def setting(dest: str, key: str, default: Any = None) -> Any:
        return resolve_setting(args, dest, comb, key, default)

    f_rep = setting("frep_hz", "f_rep_hz")
    f_aom = setting("faom_hz", "f_aom_hz")
    n = setting("n", "n")
    sign = int(setting("sign", "sign", DEFAULT_COMB_SIGN))
    delta_f_aom = setting("delta_faom_hz", "delta_f_aom_hz")
    b_rot = setting("brot_hz", "rotational_constant_hz")

    params: CombParams | None = None
    tooth: ToothRecovery | None = None
    rotational: RotationalCheck | None = None
    if delta_f_aom is not None:
        tooth = recover_n(
            delta_f_aom,
            setting("delta_frep_hz", "delta_f_rep_hz", DEFAULT_DELTA_F_REP_HZ),
            float(setting("n_tolerance", "n_tolerance", DEFAULT_N_TOLERANCE)),
        )
        if n is None:
            n = tooth.n
    if f_rep is not None and f_aom is not None and n is not None:
        params = CombParams(f_rep, f_aom, int(n), sign)
    if b_rot is not None and params is not None:
        tolerance = setting(
            "rot_tolerance", "rotational_tolerance", DEFAULT_ROTATIONAL_TOLERANCE
        )
        rotational = check_rotational_consistency(
            raman_frequency(params), RotationalModel(b_rot), float(tolerance)
        )
    if params is None and tooth is None:
        msg = (
            "Nothing to compute: give --frep-hz/--faom-hz/--n for the Raman "
            "frequency or --delta-faom-hz/--delta-frep-hz for the tooth number"
        )
        raise ValueError(msg)
    if rotational is not None and not rotational.passed:
        getAppLogger().warning(
            "f_Raman deviates from the rotational model by %.3e (tolerance %g)",
            rotational.deviation,
            rotational.tolerance,
        )
    return comb_report_lines(params=params, tooth=tooth, rotational=rotational)


def _determine_lines(
    args: argparse.Namespace, comb: dict[str, Any], root_cfg: RootConfig | None
) -> list[str]:
    """Simulated two-scan determination of an absolute transition frequency."""

    def setting(dest: str, key: str, default: Any = None) -> Any:
        return resolve_setting(args, dest, comb, key, default)

    f_rep = setting("frep_hz", "f_rep_hz")
    n = setting("n", "n")
    transition = setting("transition_hz", "transition_hz")
    if f_rep is None or n is None or transition is None:
        msg = "--determine needs --frep-hz, --n and --transition-hz"
        raise ValueError(msg)

    seed = resolve_seed(root_cfg, args)
    result = determine_transition(
        transition,
        f_rep,
        int(n),
        RotationalModel(
            setting("brot_hz", "rotational_constant_hz", DEFAULT_ROTATIONAL_CONSTANT_HZ)
        ),
        trial_rng(seed, 0, Stream.SCAN),
        delta_f_rep=setting("delta_frep_hz", "delta_f_rep_hz", DEFAULT_DELTA_F_REP_HZ),
        sign=int(setting("sign", "sign", DEFAULT_COMB_SIGN)),
        shots=int(setting("shots", "scan_shots", DEFAULT_SCAN_SHOTS)),
        points=int(setting("points", "scan_points", DEFAULT_SCAN_POINTS)),
        duration_us=COMB_CARRIER_PI_US,
    )
    head = [
        f"seed = {seed}",
        f"center_aom_1_hz = {result.center_aom_1:.3f}",
        f"center_aom_2_hz = {result.center_aom_2:.3f}",
        f"delta_f_rep_hz = {format_hz(result.delta_f_rep)}",
    ]
    return head + comb_report_lines(tooth=result.tooth, rotational=result.rotational)


def handle_comb_command(args: argparse.Namespace) -> int:
    """Comb arithmetic, or a simulated determination with --determine."""
    logger = getAppLogger()

    try:
        result = load_and_validate_config(
            getattr(args, "config", None),
            cwd=Path.cwd().resolve(),
            strict=getattr(args, "strict", None),
        )
    except (FileNotFoundError, ValueError, TypeError) as e:
        logger.errorIfNotDebug(str(e))
        return EXIT_CONFIG_ERROR
    root_cfg = result[1] if result is not None else None
    comb = config_section(root_cfg, "comb")

    try:
        if getattr(args, "determine", False):
            lines = _determine_lines(args, comb, root_cfg)
        else:
            lines = _comb_lines(args, comb)
        write_report(getattr(args, "out", None), lines)
    except (ValueError, TypeError, ZeroDivisionError) as e:
        logger.errorIfNotDebug(str(e))
        return EXIT_FAILURE
    except Exception as e:  # noqa: BLE001
        logger.criticalIfNotDebug("Unexpected error: %s", e)
        return EXIT_FAILURE
    return EXIT_OK
