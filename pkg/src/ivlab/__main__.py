"""Module entry point: python -m ivlab <command> ..."""

from .cli import main

if __name__ == "__main__":
    raise SystemExit(main())
