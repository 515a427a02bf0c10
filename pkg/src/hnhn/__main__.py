"""Module entry point so `python -m hnhn` matches the `hnhn` script."""

import sys

from hnhn.cli import main

if __name__ == "__main__":
    sys.exit(main())
