# src/molentangle/records.py

"""TrialRecord rows and their CSV form."""

from __future__ import annotations

import csv
import io
from collections.abc import Iterable
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .hilbert import AtomLevel
from .logs import getAppLogger


CSV_COLUMNS: tuple[str, ...] = (
    "trial_id",
    "protocol",
    "phi_a_rad",
    "atom_outcome",
    "mol_outcome",
    "photon_counts",
    "herald_attempts",
    "valid",
)


class MolOutcome(Enum):
    MINUS32 = "-3/2"
    MINUS52 = "-5/2"
    J0 = "0"
    OTHER = "other"
    NONE = "none"  # no readout: the herald round aborted


@dataclass(frozen=True)
class TrialRecord:
    """One shot of the experiment.

    ``herald_attempts`` counts pump sequences spent on the herald round that
    precedes this trial; it is 0 for trials that reuse an earlier herald.
    Invalid rows are kept for accounting but never enter fits. An invalid
    row that still has a readout (the molecule leaked) counts as ``other``
    in population estimates; an aborted herald has no readout at all.
    """

    trial_id: int
    protocol: str
    phi_a: float | None
    atom_outcome: AtomLevel
    mol_outcome: MolOutcome
    photon_counts: int
    herald_attempts: int = 0
    valid: bool = True

    def __post_init__(self) -> None:
        if self.photon_counts < 0:
            msg = f"photon_counts must be non-negative, got {self.photon_counts}"
            raise ValueError(msg)
        if self.herald_attempts < 0:
            msg = f"herald_attempts must be non-negative, got {self.herald_attempts}"
            raise ValueError(msg)
        if self.valid and not self.has_readout:
            msg = "A valid trial needs a molecular readout"
            raise ValueError(msg)

    @property
    def has_readout(self) -> bool:
        return self.mol_outcome is not MolOutcome.NONE

    def to_row(self) -> list[str]:
        return [
            str(self.trial_id),
            self.protocol,
            "" if self.phi_a is None else f"{self.phi_a:.17g}",
            self.atom_outcome.value,
            self.mol_outcome.value,
            str(self.photon_counts),
            str(self.herald_attempts),
            "true" if self.valid else "false",
        ]


def _parse_bool(text: str, lineno: int) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    msg = f"line {lineno}: valid must be true or false, got {text!r}"
    raise ValueError(msg)


def record_from_row(row: dict[str, str], lineno: int) -> TrialRecord:
    try:
        phi_text = row["phi_a_rad"].strip()
        return TrialRecord(
            trial_id=int(row["trial_id"]),
            protocol=row["protocol"],
            phi_a=float(phi_text) if phi_text else None,
            atom_outcome=AtomLevel(row["atom_outcome"].strip()),
            mol_outcome=MolOutcome(row["mol_outcome"].strip()),
            photon_counts=int(row["photon_counts"]),
            herald_attempts=int(row["herald_attempts"]),
            valid=_parse_bool(row["valid"], lineno),
        )
    except KeyError as e:
        msg = f"line {lineno}: missing column {e}"
        raise ValueError(msg) from e
    except (TypeError, ValueError) as e:
        msg = f"line {lineno}: {e}"
        raise ValueError(msg) from e


def format_records(records: Iterable[TrialRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows(record.to_row() for record in records)
    return buffer.getvalue()


def write_records(path: Path, records: Iterable[TrialRecord]) -> int:
    """Write records as UTF-8 CSV; returns the number of rows written."""
    rows = list(records)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_records(rows), encoding="utf-8")
    getAppLogger().debug("Wrote %d records to %s", len(rows), path)
    return len(rows)


def parse_records(text: str) -> list[TrialRecord]:
    reader = csv.DictReader(io.StringIO(text))
    missing = [c for c in CSV_COLUMNS if c not in (reader.fieldnames or ())]
    if missing:
        msg = f"Records CSV is missing columns: {', '.join(missing)}"
        raise ValueError(msg)
    # header is line 1
    return [record_from_row(row, lineno) for lineno, row in enumerate(reader, start=2)]


def read_records(path: Path) -> list[TrialRecord]:
    if not path.exists():
        msg = f"Records file not found: {path}"
        raise FileNotFoundError(msg)
    records = parse_records(path.read_text(encoding="utf-8"))
    getAppLogger().debug("Read %d records from %s", len(records), path)
    return records
