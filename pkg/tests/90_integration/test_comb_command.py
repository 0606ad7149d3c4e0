# tests/90_integration/test_comb_command.py
"""Tests for the comb command."""

import os
from pathlib import Path

import molentangle.cli as mod_cli


F_REP = "855131477587/10825"
GOLDEN = ("--frep-hz", F_REP, "--faom-hz", "165000000", "--n", "10825")


def run_in(cwd: Path, *argv: str) -> int:
    original_cwd = Path.cwd()
    try:
        os.chdir(cwd)
        return mod_cli.main(list(argv))
    finally:
        os.chdir(original_cwd)


def table(path: Path) -> dict[str, str]:
    rows = path.read_text(encoding="utf-8").splitlines()
    pairs = (row.split("=", 1) for row in rows)
    return {key.strip(): value.strip() for key, value in pairs}


def test_golden_raman_frequency(tmp_path: Path) -> None:
    argv = ("comb", *GOLDEN, "--brot-hz", "142500000000", "-o", "comb.txt")
    assert run_in(tmp_path, *argv) == 0
    values = table(tmp_path / "comb.txt")
    assert values["f_raman_hz"] == "854801477587"
    assert values["sign"] == "-1"
    assert values["expected_hz"] == "855000000000"
    assert values["rotational_pass"] == "true"


def test_tooth_recovery_from_the_aom_shift(tmp_path: Path) -> None:
    argv = ("--delta-faom-hz", "5412500", "--delta-frep-hz", "1000", "-o", "n.txt")
    assert run_in(tmp_path, "comb", *argv) == 0
    values = table(tmp_path / "n.txt")
    assert values["recovered_n"] == "10825"
    assert float(values["n_residual"]) == 0.0


def test_ambiguous_tooth_fails(tmp_path: Path) -> None:
    argv = ("--delta-faom-hz", "5412750", "--delta-frep-hz", "1000")
    assert run_in(tmp_path, "comb", *argv) == 1


def test_failed_rotational_check_still_succeeds(tmp_path: Path) -> None:
    argv = ("comb", *GOLDEN, "--brot-hz", "400000000000", "-o", "comb.txt")
    assert run_in(tmp_path, *argv) == 0
    assert table(tmp_path / "comb.txt")["rotational_pass"] == "false"


def test_values_come_from_the_comb_section(tmp_path: Path) -> None:
    (tmp_path / ".molentangle.toml").write_text(
        f'[comb]\nf_rep_hz = "{F_REP}"\nf_aom_hz = 165000000\nn = 10825\n',
        encoding="utf-8",
    )
    assert run_in(tmp_path, "comb", "-o", "comb.txt") == 0
    assert table(tmp_path / "comb.txt")["f_raman_hz"] == "854801477587"


def test_noiseless_determination_recovers_the_tooth(tmp_path: Path) -> None:
    argv = (
        "comb",
        "--determine",
        "--frep-hz",
        F_REP,
        "--n",
        "10825",
        "--transition-hz",
        "854801477587",
        "--shots",
        "0",
        "-o",
        "det.txt",
    )
    assert run_in(tmp_path, *argv) == 0
    values = table(tmp_path / "det.txt")
    assert values["recovered_n"] == "10825"
    assert values["rotational_pass"] == "true"


def test_nothing_to_compute_fails(tmp_path: Path) -> None:
    assert run_in(tmp_path, "comb") == 1
