"""Logger utility for deconvsim."""

import logging
import re
from logging import Formatter, StreamHandler, handlers
from pathlib import Path

from colorama import Fore, Style

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class ColorFormatter(Formatter):
    """Formatter that adds color to log messages based on the level."""

    COLORS = {
        "DEBUG": Fore.LIGHTCYAN_EX,
        "INFO": Fore.GREEN,
        "WARNING": Fore.YELLOW,
        "ERROR": Fore.RED,
        "CRITICAL": Fore.MAGENTA + Style.BRIGHT,
    }

    def format(self, record):
        color = self.COLORS.get(record.levelname, "")
        record = logging.makeLogRecord(record.__dict__)
        record.msg = f"{color}{record.getMessage()}{Style.RESET_ALL}"
        record.args = None

        return super().format(record)


class RecordFormater(Formatter):
    """Formatter that removes ANSI escape sequences from log messages."""

    ANSI_ESCAPE = re.compile(r"\x1B(?:[@-Z\\-_]|\[[0-?]*[ -/]*[@-~])")

    def format(self, record):
        record = logging.makeLogRecord(record.__dict__)
        record.msg = self.ANSI_ESCAPE.sub("", record.getMessage())
        record.args = None
        return super().format(record)


def create_logger(
    name: str = "deconvsim", level=logging.INFO, log_file: Path = None
) -> logging.Logger:
    """
    Attaches a colored console handler and, optionally, a rotating file handler
    to the named logger. Calling it twice does not duplicate handlers.

    Library modules log through logging.getLogger("deconvsim"), so configuring
    that logger once in the CLI is enough.
    """
    logger = logging.getLogger(name)
    logger.setLevel(logging.DEBUG)

    if not any(type(handler) is StreamHandler for handler in logger.handlers):
        console_handler = StreamHandler()
        console_handler.setFormatter(ColorFormatter(LOG_FORMAT))
        console_handler.setLevel(level)
        logger.addHandler(console_handler)

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)

        if not any(
            isinstance(handler, handlers.RotatingFileHandler)
            for handler in logger.handlers
        ):
            file_handler = handlers.RotatingFileHandler(
                filename=log_path,
                maxBytes=10 * 1024 * 1024,
                backupCount=1,
                encoding="utf-8",
            )
            file_handler.setFormatter(RecordFormater(LOG_FORMAT))
            file_handler.setLevel(logging.DEBUG)
            logger.addHandler(file_handler)

    return logger
