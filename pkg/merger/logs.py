import logging
import os
import sys
import structlog

LOG_ENV = "LOCALE_MERGE_LOG"
_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


def configure_logging(level: str | None = None) -> int:
    """Send structured log lines to stderr at the level named by LOCALE_MERGE_LOG."""
    name = (level or os.environ.get(LOG_ENV, "error")).strip().lower()
    numeric = _LEVELS.get(name, logging.ERROR)
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(numeric),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )
    return numeric
