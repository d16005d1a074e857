#!/usr/bin/env python3
"""
CLI entry point for hotmapper. See `hotmapper.cli` for commands and examples.

    python run_hotmapper.py gen two-circles --out data/circles.csv
    python run_hotmapper.py --help
"""

import sys

from hotmapper.cli import main

if __name__ == "__main__":
    sys.exit(main())
