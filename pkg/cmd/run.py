#!/usr/bin/env python3
"""
Command line launcher for dkit from a source checkout.

Usage:
    python cmd/run.py run scenarios/minkowski_gh.json [--out DIR] [--seed N] [--format json|csv]
    python cmd/run.py matrix dkit/fixtures/f1.csv --suite distinction,reflectivity
"""

import os
import sys

# Add parent directory to path to import dkit
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from dkit.cli import main


if __name__ == "__main__":
    sys.exit(main())
