import logging
import os

from importlib.metadata import version as package_version
from pathlib import Path
from typing import Dict

from flask.cli import load_dotenv
from sentry_sdk.integrations.flask import FlaskIntegration
from str2bool import str2bool

from rimforge.components import DEFAULT_TIETZE_BUDGET
from rimforge.components.enumeration import DEFAULT_MAX_COSETS
from rimforge.components.symplectic import DEFAULT_WITNESS_BUDGET


def _positive_int(variable: str, default: int) -> int:
    """
    Reads a budget from the environment

    :param variable: environment variable name
    :param default: value used when the variable is unset or empty
    :return: budget, at least 1
    """
    raw = os.environ.get(variable)
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"[{variable}] must be an integer, got [{raw}]") from None
    if value < 1:
        raise ValueError(f"[{variable}] must be at least 1, got [{value}]")
    return value


class Config:
    """
    Flask configuration base class

    Options that vary between installations (logging, error reporting and the computation budgets used when a command
    is not given explicit limits) are read from environment variables, set directly or through a .env file.

    See the project README for the list of options.
    """

    ENV = os.environ.get("FLASK_ENV", "production")
    DEBUG = False
    TESTING = False

    NAME = "rimforge"

    LOGGING_LEVEL = logging.WARNING
    LOG_FORMAT = "[%(asctime)s] %(levelname)s [%(name)s.%(funcName)s:%(lineno)d] %(message)s"
    LOG_FILE_MAX_BYTES = 5 * 1024 * 1024
    LOG_FILE_BACKUP_COUNT = 5

    def __init__(self):
        load_dotenv()

        self.APP_ENABLE_FILE_LOGGING = str2bool(os.environ.get("APP_ENABLE_FILE_LOGGING")) or False
        self.APP_ENABLE_SENTRY = str2bool(os.environ.get("APP_ENABLE_SENTRY")) or False
        self.LOG_FILE_PATH = Path(os.environ.get("APP_LOG_FILE_PATH") or "/var/log/app/app.log")
        self.SENTRY_DSN = os.environ.get("SENTRY_DSN") or None

        self.RIMFORGE_MAX_COSETS = _positive_int("RIMFORGE_MAX_COSETS", DEFAULT_MAX_COSETS)
        self.RIMFORGE_TIETZE_BUDGET = _positive_int("RIMFORGE_TIETZE_BUDGET", DEFAULT_TIETZE_BUDGET)
        self.RIMFORGE_WITNESS_BUDGET = _positive_int("RIMFORGE_WITNESS_BUDGET", DEFAULT_WITNESS_BUDGET)

    # noinspection PyPep8Naming
    @property
    def VERSION(self) -> str:
        return "Unknown"

    # noinspection PyPep8Naming
    @property
    def SENTRY_CONFIG(self) -> Dict:
        return {
            "dsn": self.SENTRY_DSN,
            "integrations": [FlaskIntegration()],
            "environment": self.ENV,
            "release": f"{self.NAME}@{self.VERSION}",
        }


class ProductionConfig(Config):  # pragma: no cover
    """
    Flask configuration for installed use

    Sentry is enabled whenever a DSN is set, unless explicitly turned off.
    """

    def __init__(self):
        super().__init__()
        _enable_sentry = os.environ.get("APP_ENABLE_SENTRY")
        self.APP_ENABLE_SENTRY = str2bool(_enable_sentry) if _enable_sentry else self.SENTRY_DSN is not None

    # noinspection PyPep8Naming
    @property
    def VERSION(self) -> str:
        return package_version(self.NAME)


class DevelopmentConfig(Config):  # pragma: no cover
    """
    Flask configuration for (local) Development environments
    """

    DEBUG = True

    LOGGING_LEVEL = logging.INFO

    def __init__(self):
        super().__init__()
        self.APP_ENABLE_SENTRY = False

    # noinspection PyPep8Naming
    @property
    def VERSION(self) -> str:
        return "N/A"


class TestingConfig(Config):
    """
    Flask configuration for Testing environments

    Budgets stay at their defaults unless set in the environment, so test expectations match the library defaults.
    """

    DEBUG = True
    TESTING = True

    LOGGING_LEVEL = logging.DEBUG

    def __init__(self):
        super().__init__()
        self.APP_ENABLE_FILE_LOGGING = False
        self.APP_ENABLE_SENTRY = False

    # noinspection PyPep8Naming
    @property
    def VERSION(self) -> str:
        return "N/A"
