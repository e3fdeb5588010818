"""
TASER detection sweeps: command-line entry point.

Equivalent to the installed `detect` script:

    python main.py --system 128x8 --mod bpsk --snr=-2:1:10 --tmax 3 \
        --trials 10000 --detectors taser,mmse,ml --seed 42 --out run.csv

Flow:
  flags → SweepConfig (pydantic) → run_sweep (thread pool, seeded substreams)
  → list[SweepRow] → run.csv + run.meta.json
"""

import sys

from taser.cli import cli_main

if __name__ == "__main__":
    sys.exit(cli_main(sys.argv[1:]))
