import os

import pytest

os.environ.setdefault("FLASK_ENV", "testing")

from rimforge import create_app  # noqa: E402


@pytest.fixture
def app():
    app = create_app()
    return app


@pytest.fixture
def app_runner(app):
    return app.test_cli_runner()
