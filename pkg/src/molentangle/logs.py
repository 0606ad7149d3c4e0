# src/molentangle/logs.py

"""The application logger.

Importing this module installs ``apathetic_logging.Logger`` as the logger
class and registers the TRACE/SILENT levels, the ``MOLENTANGLE_LOG_LEVEL``
and ``LOG_LEVEL`` env vars and the default level. Everything in the package
logs through ``getAppLogger()``; worker processes re-import it and get the
same setup.
"""

import logging
from typing import cast

from apathetic_logging import (
    Logger,
    makeSafeTrace,
    registerDefaultLogLevel,
    registerLogger,
    registerLogLevelEnvVars,
)

from .constants import DEFAULT_ENV_LOG_LEVEL, DEFAULT_LOG_LEVEL
from .meta import PROGRAM_ENV, PROGRAM_PACKAGE


logging.setLoggerClass(Logger)
Logger.extendLoggingModule()

# order matters: both must be registered before the first getLogger()
registerLogLevelEnvVars(
    [f"{PROGRAM_ENV}_{DEFAULT_ENV_LOG_LEVEL}", DEFAULT_ENV_LOG_LEVEL]
)
registerDefaultLogLevel(DEFAULT_LOG_LEVEL)
registerLogger(PROGRAM_PACKAGE)

_APP_LOGGER = cast("Logger", logging.getLogger(PROGRAM_PACKAGE))

_safe_trace = makeSafeTrace()


def getAppLogger() -> Logger:  # noqa: N802
    """Return the package logger, typed as ``apathetic_logging.Logger``."""
    _safe_trace(
        "getAppLogger()",
        f"id={id(_APP_LOGGER)}",
        f"level={_APP_LOGGER.levelName}",
    )
    return _APP_LOGGER
