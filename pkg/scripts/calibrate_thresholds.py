#!/usr/bin/env python3
"""Regenerate data/thresholds.json for the rank-vs-Haar distinguisher.

Runs the calibration corpus for each requested (n, k) pair and merges the
results into a single thresholds file; reruns with the same seed are
byte-identical.

Usage: python scripts/calibrate_thresholds.py [--out data/thresholds.json]
"""

import argparse
import os
import sys

from stab_lab.cli import main as cli_main

DEFAULT_PAIRS = [(4, 1), (4, 2)]


def run(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out",
        default=os.path.join(
            os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
            "data",
            "thresholds.json",
        ),
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--corpus-size", type=int, default=100)
    parser.add_argument("--shots", type=int, default=10_000)
    args = parser.parse_args(argv)

    for n, k in DEFAULT_PAIRS:
        code = cli_main(
            [
                "calibrate",
                "--n", str(n),
                "--k", str(k),
                "--seed", str(args.seed),
                "--corpus-size", str(args.corpus_size),
                "--shots", str(args.shots),
                "--merge-into", args.out,
                "--out", args.out,
            ]
        )
        if code != 0:
            return code
        print(f"calibrated (n={n}, k={k}) -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
