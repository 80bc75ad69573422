#!/usr/bin/env python3
"""Run the ionphonon CLI for ground-state sweeps and solver comparisons."""

import sys
sys.path.append('.')

from ionphonon.cli.main import main

if __name__ == "__main__":
    main()
