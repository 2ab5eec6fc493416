#!/usr/bin/env python3
"""Dump eigenfunction grids and spectra to CSV for plotting.

Writes, into --outdir:
    spectrum_<model>.csv                       eigenvalue tables
    <family><indices>_grid.csv                 re/im on a square grid

Usage:
    python scripts/dump_grids.py --outdir out [--hbar H] [--points 81]
"""

import argparse
import pathlib
import subprocess
import sys


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="grids")
    ap.add_argument("--hbar", type=float, default=1.0)
    ap.add_argument("--points", type=int, default=81)
    ap.add_argument("--extent", type=float, default=3.0)
    args = ap.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    grid = f"x=-{args.extent}:{args.extent}:{args.points},p=-{args.extent}:{args.extent}:{args.points}"

    def cli(*cli_args):
        cmd = [sys.executable, "-m", "mqds.cli", *cli_args, "--hbar", str(args.hbar)]
        subprocess.run(cmd, check=True)

    for model, family, extra in (("oscillator", "W", []),
                                 ("damped_toy", "F", ["--sign", "+"]),
                                 ("damped_ho", "F", ["--sign", "+", "--max-m", "3"])):
        cli("spectrum", "--model", model, "--family", family, "--max-n", "3", *extra,
            "--out", str(outdir / f"spectrum_{model}.csv"))

    for n in (0, 1, 2, 3):
        cli("eigenfunction", "--model", "oscillator", "--family", "W", "--n", str(n),
            "--grid", grid, "--out", str(outdir / f"W{n}_grid.csv"))
        cli("eigenfunction", "--model", "damped_toy", "--family", "F", "--n", str(n),
            "--sign", "+", "--grid", grid, "--out", str(outdir / f"F{n}plus_grid.csv"))
    print(f"wrote grids and spectra to {outdir}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
