# src/molentangle/commands/fit.py

"""Handle the fit subcommand."""

import argparse
from pathlib import Path

from molentangle.analysis import (
    bootstrap_uncertainty,
    fit_fringe,
    fit_report_lines,
    fringe_points,
    write_plot_csv,
)
from molentangle.campaign import qubit_of_records
from molentangle.constants import EXIT_FAILURE, EXIT_NUMERIC_ERROR, EXIT_OK
from molentangle.logs import getAppLogger
from molentangle.protocols import QubitKind
from molentangle.records import TrialRecord, read_records


def resolve_qubit(
    requested: str | None, records: list[TrialRecord]
) -> QubitKind:
    """--qubit wins; otherwise the qubit the rows' protocol names imply."""
    if requested is not None:
        return QubitKind(requested)
    qubit = qubit_of_records(records)
    if qubit is None:
        msg = "Cannot tell the qubit from the records; pass --qubit low|high"
        raise ValueError(msg)
    return qubit


def write_report(path: str | None, lines: list[str]) -> None:
    logger = getAppLogger()
    for line in lines:
        logger.info(line)
    if path:
        out = Path(path)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text("\n".join(lines) + "\n", encoding="utf-8")
        logger.debug("Wrote report to %s", out)


def handle_fit_command(args: argparse.Namespace) -> int:
    """Fit the parity fringe of a records file."""
    logger = getAppLogger()

    try:
        records = read_records(Path(args.records))
        qubit = resolve_qubit(getattr(args, "qubit", None), records)
        points = fringe_points(records, qubit)
        fit = fit_fringe(points)
        logger.debug("Fitted %d fringe point(s) (%s qubit)", len(points), qubit.value)

        bootstrap = None
        resamples = getattr(args, "bootstrap", None)
        if resamples:
            bootstrap = bootstrap_uncertainty(
                records,
                qubit,
                resamples=resamples,
                seed=getattr(args, "seed", None) or 0,
                workers=getattr(args, "workers", None) or 1,
            )

        fringe_csv = getattr(args, "fringe_csv", None)
        if fringe_csv:
            write_plot_csv(Path(fringe_csv), points, fit)

        write_report(
            getattr(args, "out", None),
            fit_report_lines(fit, qubit=qubit, bootstrap=bootstrap),
        )
    except ArithmeticError as e:
        logger.errorIfNotDebug("Numeric error: %s", e)
        return EXIT_NUMERIC_ERROR
    except (FileNotFoundError, ValueError, TypeError, RuntimeError) as e:
        logger.errorIfNotDebug(str(e))
        return EXIT_FAILURE
    except Exception as e:  # noqa: BLE001
        logger.criticalIfNotDebug("Unexpected error: %s", e)
        return EXIT_FAILURE
    return EXIT_OK
