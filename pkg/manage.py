from rimforge import create_app

app = create_app()
