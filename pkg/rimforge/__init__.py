import os

import sentry_sdk

from logging import Formatter
from logging.handlers import RotatingFileHandler
from typing import Any, Dict

from flask import Flask, logging as flask_logging

# noinspection PyPackageRequirements
from werkzeug.utils import import_string

from rimforge.cli import alexander, branched_cover, distinguish, kd, rim_surgery, symplectic, version

COMMANDS = {
    "version": version,
    "branched-cover": branched_cover,
    "rim-surgery": rim_surgery,
    "alexander": alexander,
    "distinguish": distinguish,
    "kd": kd,
    "symplectic": symplectic,
}


def _create_app_config() -> Dict[str, Any]:
    """
    Creates an object to use as a Flask app's configuration

    The config class is picked from FLASK_ENV (production when unset). Kept separate from the app factory so tests can
    replace it.

    :return: object for a Flask app's configuration
    """
    environment = str(os.environ.get("FLASK_ENV") or "production")
    return import_string(f"rimforge.config.{environment.capitalize()}Config")()


def _configure_logging(app: Flask) -> None:
    """
    Component modules log through 'rimforge.components.*' loggers, which propagate to the app logger configured here.
    """
    formatter = Formatter(app.config["LOG_FORMAT"])
    app.logger.setLevel(app.config["LOGGING_LEVEL"])
    flask_logging.default_handler.setFormatter(formatter)

    if app.config["APP_ENABLE_FILE_LOGGING"]:
        file_log = RotatingFileHandler(
            app.config["LOG_FILE_PATH"],
            maxBytes=app.config["LOG_FILE_MAX_BYTES"],
            backupCount=app.config["LOG_FILE_BACKUP_COUNT"],
        )
        file_log.setLevel(app.config["LOGGING_LEVEL"])
        file_log.setFormatter(formatter)
        app.logger.addHandler(file_log)


def create_app() -> Flask:
    """
    Flask app factory

    The application has no routes. It carries the configuration, logging, error reporting and the CLI commands that
    run constructions.

    :return: Flask application instance
    """
    app = Flask(__name__)
    app.config.from_object(_create_app_config())
    _configure_logging(app)

    if app.config["APP_ENABLE_SENTRY"]:
        app.logger.info("Sentry error reporting enabled")
        sentry_sdk.init(**app.config["SENTRY_CONFIG"])

    app.logger.info(f"{app.config['NAME']} ({app.config['VERSION']}) [{app.config['ENV']}]")

    for name, command in COMMANDS.items():
        app.cli.add_command(command, name)

    return app
