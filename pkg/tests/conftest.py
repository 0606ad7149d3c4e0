# tests/conftest.py
"""Shared test setup: logger isolation and the debug-test filter."""

from collections.abc import Generator

import apathetic_logging as alib_logging
import pytest

from tests.utils import (
    DEFAULT_TEST_LOG_LEVEL,
    direct_logger,
    module_logger,
)


# These fixtures are intentionally re-exported so pytest can discover them.
__all__ = [
    "direct_logger",
    "module_logger",
]


# ----------------------------------------------------------------------
# Fixtures
# ----------------------------------------------------------------------


@pytest.fixture(autouse=True)
def reset_logger_level() -> Generator[None, None, None]:
    """Start and finish every test at the default test log level.

    ``cli.main`` sets the app logger's level from its flags, and the
    logger is a process-wide singleton.
    """
    logger = alib_logging.getLogger()
    logger.setLevel(DEFAULT_TEST_LOG_LEVEL)
    yield
    logger.setLevel(DEFAULT_TEST_LOG_LEVEL)


# ----------------------------------------------------------------------
# Hooks
# ----------------------------------------------------------------------


def pytest_configure(config: pytest.Config) -> None:
    """Hide skipped tests from the short summary in quiet runs."""
    verbose = getattr(config.option, "verbose", 0)
    if verbose <= 0:
        reportchars = getattr(config.option, "reportchars", "")
        if reportchars == "a":
            config.option.reportchars = "fExX"
        elif "s" in reportchars or "P" in reportchars:
            config.option.reportchars = reportchars.replace("s", "").replace("P", "")


def pytest_collection_modifyitems(
    config: pytest.Config,
    items: list[pytest.Item],
) -> None:
    """Skip @pytest.mark.debug tests unless -k asks for them."""
    keywords = config.getoption("-k") or ""
    if "debug" in keywords.lower():
        return
    for item in items:
        # the marker itself, not "debug" in a parametrized id
        if item.get_closest_marker("debug") is not None:
            item.add_marker(
                pytest.mark.skip(reason="Skipped debug test (use -k debug to run)"),
            )
