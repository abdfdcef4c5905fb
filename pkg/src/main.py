# src/main.py
"""Entry point: `python -m src.main <command> key=value ...`."""
import logging
import sys

from src.core.config import settings


def configure_logging(level: str = settings.log_level) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s [%(name)s] %(message)s",
    )


def main() -> int:
    configure_logging()
    from src.api.cli import main as cli_main
    return cli_main()


if __name__ == "__main__":
    sys.exit(main())
