from flask.cli import FlaskGroup

from rimforge import create_app

cli = FlaskGroup(create_app=create_app, help="Surface knot group constructions")

if __name__ == "__main__":  # pragma: no cover
    cli()
