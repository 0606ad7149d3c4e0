# src/molentangle/commands/report.py

"""Handle the report subcommand."""

import argparse
from pathlib import Path

from molentangle.analysis import (
    bootstrap_uncertainty,
    fidelity_from_populations,
    fit_fringe,
    fit_report_lines,
    fringe_points,
    populations_for,
)
from molentangle.constants import EXIT_FAILURE, EXIT_NUMERIC_ERROR, EXIT_OK
from molentangle.errors import InsufficientDataError
from molentangle.logs import getAppLogger
from molentangle.records import TrialRecord, read_records

from .fit import resolve_qubit, write_report


def handle_report_command(args: argparse.Namespace) -> int:
    """Fidelity report from a parity scan plus a population run.

    Rows with an analysis phase feed the fringe fit; rows without one feed
    the populations. Both may come from one file or from several.
    """
    logger = getAppLogger()

    try:
        records: list[TrialRecord] = []
        for path in args.records:
            records += read_records(Path(path))
        qubit = resolve_qubit(getattr(args, "qubit", None), records)

        scan = [r for r in records if r.phi_a is not None]
        populations = populations_for(records, qubit)
        if populations.total == 0:
            msg = (
                "No population rows (rows without phi_a); add the records "
                f"of a {qubit.value}-qubit population run"
            )
            raise InsufficientDataError(msg)  # noqa: TRY301

        fit = fit_fringe(fringe_points(scan, qubit))
        report = fidelity_from_populations(populations, fit)

        bootstrap = None
        resamples = getattr(args, "bootstrap", None)
        if resamples:
            bootstrap = bootstrap_uncertainty(
                scan,
                qubit,
                resamples=resamples,
                seed=getattr(args, "seed", None) or 0,
                population_records=[r for r in records if r.phi_a is None],
                workers=getattr(args, "workers", None) or 1,
            )

        write_report(
            getattr(args, "out", None),
            fit_report_lines(
                fit,
                qubit=qubit,
                bootstrap=bootstrap,
                report=report,
                populations=populations,
            ),
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
