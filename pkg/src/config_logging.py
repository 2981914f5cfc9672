import logging
import sys
from src._compat import StrEnum

LOG_FORMAT = "%(levelname)s:%(message)s"
LOG_FORMAT_DEBUG = "%(levelname)s:%(message)s:%(pathname)s:%(funcName)s:%(lineno)d"


class LogLevels(StrEnum):
    info = "INFO"
    warn = "WARN"
    error = "ERROR"
    debug = "DEBUG"


def configure_logging(log_level: str = LogLevels.warn):
    """Route logs to stderr; stdout carries the command reports."""
    log_level = str(log_level).upper()
    if log_level not in {level.value for level in LogLevels}:
        log_level = LogLevels.error

    log_format = LOG_FORMAT_DEBUG if log_level == LogLevels.debug else LOG_FORMAT
    logging.basicConfig(level=log_level, format=log_format, stream=sys.stderr, force=True)
