# src/molentangle/actions.py

from contextlib import suppress
from pathlib import Path
from typing import Any

from apathetic_utils import load_toml, run_with_output

from .logs import getAppLogger
from .meta import Metadata


UNKNOWN = "unknown"


def _version_from_pyproject(root: Path) -> str:
    """Read project.version, falling back to tool.poetry.version."""
    pyproject = root / "pyproject.toml"
    if not pyproject.exists():
        return UNKNOWN

    with suppress(Exception):
        data: Any = load_toml(pyproject)
        if isinstance(data, dict):
            for section in (
                data.get("project"),  # pyright: ignore[reportUnknownMemberType]
                data.get("tool", {}).get("poetry"),  # pyright: ignore[reportUnknownMemberType]
            ):
                if isinstance(section, dict):
                    version = section.get("version")  # pyright: ignore[reportUnknownMemberType, reportUnknownVariableType]
                    if isinstance(version, str):
                        return version
    return UNKNOWN


def _commit_from_git(root: Path) -> str:
    with suppress(Exception):
        result = run_with_output(
            ["git", "rev-parse", "--short", "HEAD"],
            cwd=root,
            check=True,
        )
        if result.stdout:
            return result.stdout.strip()
    return UNKNOWN


def get_metadata() -> Metadata:
    """Return version and commit for this tool.

    Version comes from the source checkout's pyproject.toml, commit from git.
    Either is "unknown" when unavailable (e.g. an installed wheel).
    """
    logger = getAppLogger()
    root = Path(__file__).resolve().parents[2]
    logger.trace("get_metadata ran from: %s", root)

    version = _version_from_pyproject(root)
    commit = _commit_from_git(root)
    logger.trace(f"got package version {version} with commit {commit}")
    return Metadata(version, commit)
