"""Entry point for running as python -m monotone_cover."""

from monotone_cover.cli import app

if __name__ == "__main__":
    app()
