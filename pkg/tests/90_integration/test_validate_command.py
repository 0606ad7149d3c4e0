# tests/90_integration/test_validate_command.py
"""Tests for the validate command."""

import os
from pathlib import Path

import molentangle.cli as mod_cli


def run_in(cwd: Path, *argv: str) -> int:
    original_cwd = Path.cwd()
    try:
        os.chdir(cwd)
        return mod_cli.main(list(argv))
    finally:
        os.chdir(original_cwd)


def test_valid_config(tmp_path: Path) -> None:
    (tmp_path / ".molentangle.toml").write_text(
        '[experiment]\npreset = "low"\nseed = 4\n', encoding="utf-8"
    )
    assert run_in(tmp_path, "validate") == 0


def test_invalid_config_exits_two(tmp_path: Path) -> None:
    (tmp_path / ".molentangle.jsonc").write_text(
        '{"noise": {"prep_error": 2.0}}', encoding="utf-8"
    )
    assert run_in(tmp_path, "validate") == 2  # noqa: PLR2004


def test_unknown_key_passes_only_when_lenient(tmp_path: Path) -> None:
    (tmp_path / ".molentangle.toml").write_text(
        "[experiment]\nshots = 3\n", encoding="utf-8"
    )
    assert run_in(tmp_path, "validate") == 2  # noqa: PLR2004
    assert run_in(tmp_path, "validate", "--lenient") == 0


def test_unresolvable_experiment_exits_two(tmp_path: Path) -> None:
    """Schema-valid, but the custom sequence names an unknown pulse."""
    (tmp_path / "exp.toml").write_text(
        '[experiment]\nprotocol = "custom"\nsequence = ["spin_flip 1 0"]\n',
        encoding="utf-8",
    )
    assert run_in(tmp_path, "validate", "--config", "exp.toml") == 2  # noqa: PLR2004


def test_missing_config_exits_one(tmp_path: Path) -> None:
    assert run_in(tmp_path, "validate") == 1
