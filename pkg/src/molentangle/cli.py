import argparse
import sys
from collections.abc import Callable
from difflib import get_close_matches

from apathetic_logging import LEVEL_ORDER

from .actions import get_metadata
from .campaign import PROTOCOL_NAMES
from .commands import (
    handle_comb_command,
    handle_fit_command,
    handle_init_command,
    handle_report_command,
    handle_simulate_command,
    handle_validate_command,
)
from .constants import EXIT_CONFIG_ERROR, MAX_SEED
from .logs import getAppLogger
from .meta import DESCRIPTION, PROGRAM_CONFIG, PROGRAM_SCRIPT
from .presets import PRESETS
from .protocols import QubitKind


Handler = Callable[[argparse.Namespace], int]

COMMAND_HANDLERS: dict[str, Handler] = {
    "simulate": handle_simulate_command,
    "fit": handle_fit_command,
    "report": handle_report_command,
    "comb": handle_comb_command,
    "validate": handle_validate_command,
    "init": handle_init_command,
}

QUBIT_NAMES = tuple(q.value for q in QubitKind)


# --------------------------------------------------------------------------- #
# CLI setup and helpers
# --------------------------------------------------------------------------- #


def _handle_early_exits(args: argparse.Namespace) -> int | None:
    """
    Handle early exit conditions (version, etc.).

    Returns exit code if we should exit early, None otherwise.
    """
    logger = getAppLogger()

    # --- Version flag ---
    if getattr(args, "version", None):
        meta = get_metadata()
        logger.info(meta.banner)
        return 0

    return None


class HintingArgumentParser(argparse.ArgumentParser):
    """Argument parser that provides helpful hints for mistyped arguments."""

    def error(self, message: str) -> None:  # type: ignore[override]
        """Override error to provide hints for unrecognized arguments."""
        # Build known option strings: ["-v", "--verbose", "--log-level", ...]
        known_opts: list[str] = []
        for action in self._actions:
            known_opts.extend([s for s in action.option_strings if s])

        hint_lines: list[str] = []
        # Argparse message for bad flags is typically
        # "unrecognized arguments: --sede ..."
        if "unrecognized arguments:" in message:
            bad = message.split("unrecognized arguments:", 1)[1].strip()
            bad_args = [tok for tok in bad.split() if tok.startswith("-")]
            for arg in bad_args:
                close = get_close_matches(arg, known_opts, n=1, cutoff=0.6)
                if close:
                    hint_lines.append(f"Hint: did you mean {close[0]}?")

        self.print_usage(sys.stderr)
        full = f"{self.prog}: error: {message}"
        if hint_lines:
            full += "\n" + "\n".join(hint_lines)
        self.exit(EXIT_CONFIG_ERROR, full + "\n")


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError as e:
        msg = f"invalid seed {text!r}"
        raise argparse.ArgumentTypeError(msg) from e
    if not 0 <= value <= MAX_SEED:
        msg = f"seed must fit in 64 unsigned bits, got {value}"
        raise argparse.ArgumentTypeError(msg)
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as e:
        msg = f"invalid integer {text!r}"
        raise argparse.ArgumentTypeError(msg) from e
    if value < 1:
        msg = f"must be at least 1, got {value}"
        raise argparse.ArgumentTypeError(msg)
    return value


def _common_parser() -> argparse.ArgumentParser:
    """Config and terminal flags shared by every subcommand."""
    common = argparse.ArgumentParser(add_help=False)

    # --- Config flags ---
    config = common.add_argument_group("Config flags")
    config.add_argument(
        "-c",
        "--config",
        default=None,
        metavar="PATH",
        help=(
            "Experiment file (default: search for "
            f".{PROGRAM_CONFIG}.toml/.jsonc/.json upwards from cwd)."
        ),
    )
    strictness = config.add_mutually_exclusive_group()
    strictness.add_argument(
        "--strict",
        dest="strict",
        action="store_const",
        const=True,
        help="Treat unknown config keys as errors. (default)",
    )
    strictness.add_argument(
        "--lenient",
        dest="strict",
        action="store_const",
        const=False,
        help="Only warn about unknown config keys.",
    )
    strictness.set_defaults(strict=None)

    # --- Terminal flags ---
    term = common.add_argument_group("Terminal flags")

    # color
    color = term.add_mutually_exclusive_group()
    color.add_argument(
        "--no-color",
        dest="use_color",
        action="store_const",
        const=False,
        help="Disable ANSI color output.",
    )
    color.add_argument(
        "--color",
        dest="use_color",
        action="store_const",
        const=True,
        help="Force-enable ANSI color output (overrides auto-detect).",
    )
    color.set_defaults(use_color=None)

    # verbosity
    log_level = term.add_mutually_exclusive_group()
    log_level.add_argument(
        "-q",
        "--quiet",
        action="store_const",
        const="warning",
        dest="log_level",
        help="Suppress non-critical output (same as --log-level warning).",
    )
    log_level.add_argument(
        "-b",
        "--brief",
        action="store_const",
        const="brief",
        dest="log_level",
        help="Show brief output (same as --log-level brief).",
    )
    log_level.add_argument(
        "-d",
        "--detail",
        action="store_const",
        const="detail",
        dest="log_level",
        help="Show detailed output (same as --log-level detail).",
    )
    log_level.add_argument(
        "-v",
        "--verbose",
        action="store_const",
        const="debug",
        dest="log_level",
        help="Verbose output (same as --log-level debug).",
    )
    log_level.add_argument(
        "--log-level",
        choices=LEVEL_ORDER,
        default=None,
        dest="log_level",
        help="Set log verbosity level.",
    )
    return common


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    """--seed and --workers, shared by the commands that draw random numbers."""
    parser.add_argument(
        "--seed",
        type=_seed,
        default=None,
        metavar="U64",
        help="Root seed of every random stream (overrides the config).",
    )
    parser.add_argument(
        "--workers",
        type=_positive_int,
        default=None,
        metavar="K",
        help="Worker processes; results do not depend on K.",
    )


def _add_analysis_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--qubit",
        choices=QUBIT_NAMES,
        default=None,
        help="Qubit to analyse (default: inferred from the records' protocol).",
    )
    parser.add_argument(
        "--bootstrap",
        type=_positive_int,
        default=None,
        metavar="N",
        help="Add a bootstrap uncertainty with N resamples (at least 100).",
    )
    parser.add_argument(
        "-o",
        "--out",
        default=None,
        metavar="FILE",
        help="Also write the report to FILE.",
    )
    _add_run_flags(parser)


def _add_simulate_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--protocol",
        choices=PROTOCOL_NAMES,
        default=None,
        help="Protocol to run (overrides experiment.protocol).",
    )
    parser.add_argument(
        "--preset",
        choices=tuple(PRESETS),
        default=None,
        help="Use a published phase schedule; implies the matching parity scan.",
    )
    parser.add_argument(
        "-o",
        "--out",
        default=None,
        metavar="DIR",
        help="Output directory (overrides experiment.out_dir).",
    )
    parser.add_argument(
        "--trials",
        type=_positive_int,
        default=None,
        metavar="N",
        help="Trials for non-scan protocols.",
    )
    parser.add_argument(
        "--budget",
        type=_positive_int,
        default=None,
        metavar="ROWS",
        help="Global row budget (default: 10x the planned trials).",
    )
    _add_run_flags(parser)


def _add_fit_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--records",
        required=True,
        metavar="PATH",
        help="records.csv written by simulate.",
    )
    parser.add_argument(
        "--fringe-csv",
        default=None,
        metavar="FILE",
        help="Write per-phase parities and the fitted model to FILE.",
    )
    _add_analysis_flags(parser)


def _add_report_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--records",
        required=True,
        action="append",
        metavar="PATH",
        help="Records file; repeat to combine scan and population runs.",
    )
    _add_analysis_flags(parser)


def _add_comb_flags(parser: argparse.ArgumentParser) -> None:
    values = parser.add_argument_group("Comb values (override [comb])")
    values.add_argument("--frep-hz", dest="frep_hz", metavar="HZ")
    values.add_argument("--faom-hz", dest="faom_hz", metavar="HZ")
    values.add_argument("--n", dest="n", type=_positive_int, metavar="N")
    values.add_argument("--sign", type=int, choices=(-1, 1), default=None)
    values.add_argument("--delta-faom-hz", dest="delta_faom_hz", metavar="HZ")
    values.add_argument("--delta-frep-hz", dest="delta_frep_hz", metavar="HZ")
    values.add_argument("--brot-hz", dest="brot_hz", metavar="HZ")
    values.add_argument("--n-tolerance", dest="n_tolerance", type=float)
    values.add_argument("--rot-tolerance", dest="rot_tolerance", type=float)

    determine = parser.add_argument_group("Simulated determination")
    determine.add_argument(
        "--determine",
        action="store_true",
        help="Simulate two lineshape scans and recover N and f_Raman.",
    )
    determine.add_argument("--transition-hz", dest="transition_hz", metavar="HZ")
    determine.add_argument("--shots", type=int, default=None, metavar="N")
    determine.add_argument("--points", type=_positive_int, default=None)
    determine.add_argument(
        "--seed", type=_seed, default=None, metavar="U64", help="Scan seed."
    )
    parser.add_argument(
        "-o",
        "--out",
        default=None,
        metavar="FILE",
        help="Also write the table to FILE.",
    )


def _setup_parser() -> argparse.ArgumentParser:
    """Define and return the CLI argument parser."""
    parser = HintingArgumentParser(
        prog=PROGRAM_SCRIPT,
        description=DESCRIPTION,
    )
    parser.add_argument(
        "--version",
        action="store_true",
        help="Show version information and exit.",
    )
    parser.set_defaults(log_level=None, use_color=None)

    common = _common_parser()
    sub = parser.add_subparsers(
        dest="command",
        metavar="COMMAND",
        parser_class=HintingArgumentParser,
    )
    _add_simulate_flags(
        sub.add_parser(
            "simulate",
            parents=[common],
            help="Run a Monte Carlo campaign and write its output tree.",
        )
    )
    _add_fit_flags(
        sub.add_parser(
            "fit",
            parents=[common],
            help="Fit the parity fringe of a records file.",
        )
    )
    _add_report_flags(
        sub.add_parser(
            "report",
            parents=[common],
            help="Fidelity report from a parity scan and a population run.",
        )
    )
    _add_comb_flags(
        sub.add_parser(
            "comb",
            parents=[common],
            help="Frequency-comb Raman arithmetic and tooth identification.",
        )
    )
    sub.add_parser(
        "validate",
        parents=[common],
        help="Check an experiment file without running it.",
    )
    init = sub.add_parser(
        "init",
        parents=[common],
        help=f"Write a commented .{PROGRAM_CONFIG}.toml template.",
    )
    init.add_argument(
        "-f",
        "--force",
        action="store_true",
        help="Overwrite an existing file.",
    )
    return parser


def main(args: list[str] | None = None) -> int:
    """Main entry point for the molentangle CLI."""
    logger = getAppLogger()

    parser = _setup_parser()
    parsed_args = parser.parse_args(args)

    # Initialize logger with CLI args
    resolved_log_level = logger.determineLogLevel(args=parsed_args)
    logger.setLevel(resolved_log_level)

    # Initialize color output based on CLI args
    use_color = getattr(parsed_args, "use_color", None)
    if use_color is not None:
        logger.enable_color = use_color
    else:
        logger.enable_color = logger.determineColorEnabled()

    # --- Handle early exits (version, etc.) ---
    early_exit_code = _handle_early_exits(parsed_args)
    if early_exit_code is not None:
        return early_exit_code

    if parsed_args.command is None:
        parser.error("a command is required")
        return EXIT_CONFIG_ERROR  # pragma: no cover (parser.error raises SystemExit)

    return COMMAND_HANDLERS[parsed_args.command](parsed_args)


if __name__ == "__main__":
    sys.exit(main())
