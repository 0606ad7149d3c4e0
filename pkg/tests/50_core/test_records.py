# tests/50_core/test_records.py
"""Tests for the records CSV format."""

from pathlib import Path

import pytest

import molentangle.hilbert as mod_hilbert
import molentangle.records as mod_records


HEADER = ",".join(mod_records.CSV_COLUMNS)


def test_written_file_reads_back(tmp_path: Path) -> None:
    records = [
        mod_records.TrialRecord(
            0,
            "parity_scan_L",
            0.1,
            mod_hilbert.AtomLevel.S,
            mod_records.MolOutcome.MINUS52,
            17,
            herald_attempts=2,
        ),
        mod_records.TrialRecord(
            1,
            "parity_scan_L",
            None,
            mod_hilbert.AtomLevel.D,
            mod_records.MolOutcome.OTHER,
            0,
            valid=False,
        ),
    ]
    path = tmp_path / "nested" / "records.csv"
    assert mod_records.write_records(path, records) == 2  # noqa: PLR2004
    assert mod_records.read_records(path) == records


def test_header_and_row_layout() -> None:
    record = mod_records.TrialRecord(
        3, "prepare", None, mod_hilbert.AtomLevel.S, mod_records.MolOutcome.J0, 9
    )
    text = mod_records.format_records([record])
    assert text.splitlines() == [HEADER, "3,prepare,,S,0,9,0,true"]


@pytest.mark.parametrize("flag", ["yes", "1", "TRUE"])
def test_valid_column_accepts_common_spellings(flag: str) -> None:
    text = f"{HEADER}\n0,prepare,,S,-3/2,5,0,{flag}\n"
    (record,) = mod_records.parse_records(text)
    assert record.valid


def test_missing_columns_are_named() -> None:
    header = ",".join(mod_records.CSV_COLUMNS[:-2])
    with pytest.raises(ValueError, match="missing columns: herald_attempts, valid"):
        mod_records.parse_records(header + "\n")


@pytest.mark.parametrize(
    ("row", "match"),
    [
        ("0,prepare,,X,-3/2,5,0,true", "line 2"),
        ("0,prepare,,S,-1/2,5,0,true", "line 2"),
        ("0,prepare,,S,-3/2,-5,0,true", "non-negative"),
        ("0,prepare,,S,-3/2,5,0,maybe", "valid must be true or false"),
        ("0,prepare,abc,S,-3/2,5,0,true", "line 2"),
        ("0,prepare,,D,none,0,3,true", "needs a molecular readout"),
    ],
)
def test_bad_rows_report_their_line(row: str, match: str) -> None:
    with pytest.raises(ValueError, match=match):
        mod_records.parse_records(f"{HEADER}\n{row}\n")


def test_missing_file_raises(tmp_path: Path) -> None:
    with pytest.raises(FileNotFoundError, match="Records file not found"):
        mod_records.read_records(tmp_path / "absent.csv")


def test_aborted_herald_row_has_no_readout() -> None:
    text = f"{HEADER}\n4,parity_scan_L,0.5,D,none,0,50,false\n"
    (record,) = mod_records.parse_records(text)
    assert record.mol_outcome is mod_records.MolOutcome.NONE
    assert not record.has_readout
    assert record.herald_attempts == 50  # noqa: PLR2004
