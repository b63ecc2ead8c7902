#!/usr/bin/env python3
"""Sweep the field-2 drive power and record the integrated emission trend.

Writes a CSV of integrated rate versus power together with a linear fit
and the maximum relative deviation from it.  Note the printed five-field
susceptibility saturates with drive power in this model, so the trend is
flat-to-decreasing rather than linear; the deviation figure quantifies
that directly.
"""
import argparse
import sys
from pathlib import Path

from triphoton.cli import main as cli


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/power_sweep.csv")
    ap.add_argument("--config", default=None, help="flat key=value config file")
    ap.add_argument("--from", dest="start", default="5mW")
    ap.add_argument("--to", dest="stop", default="40mW")
    ap.add_argument("--steps", type=int, default=8)
    args = ap.parse_args()

    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    cfg = ["--config", args.config] if args.config else []
    code = cli(["sweep", *cfg, "--param", "power2", "--from", args.start,
                "--to", args.stop, "--steps", str(args.steps),
                "--out", args.out])
    sys.exit(code)


if __name__ == "__main__":
    main()
