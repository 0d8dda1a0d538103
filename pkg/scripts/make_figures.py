#!/usr/bin/env python3
"""Regenerate every figure dataset as CSV (and render images when the
figplot package is installed).

Usage: python scripts/make_figures.py [outdir] [--grid N] [--seed N]
"""

import argparse
import shutil
import subprocess
import sys
from pathlib import Path

from spinmetro import cli


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("outdir", nargs="?", default="figures")
    parser.add_argument("--grid", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    seed = str(args.seed)
    grid = str(args.grid)

    jobs = [
        (["fig-dimension", "--m-max", "12"], "fig-dimension.csv", "dimension"),
        (["fig-surface", "--xi2-sq", "0.2", "--grid", grid], "fig-surface-a.csv", "surface"),
        (["fig-surface", "--xi2-sq", "0.4", "--grid", grid], "fig-surface-b.csv", "surface"),
        (["fig-surface", "--xi2-sq", "0.6", "--grid", grid], "fig-surface-c.csv", "surface"),
        (["fig-surface", "--xi2-sq", "0.7", "--grid", grid], "fig-surface-d.csv", "surface"),
        (["fig-contour", "--grid", grid], "fig-contour.csv", "contour"),
        (["fig-appendix", "--grid", grid], "fig-appendix.csv", "appendix"),
    ]
    for argv, name, _ in jobs:
        path = outdir / name
        code = cli.main(argv + ["--seed", seed, "--out", str(path)])
        if code != 0:
            return code
        print(f"wrote {path}")

    figplot = shutil.which("figplot")
    if figplot is None:
        print("figplot not installed; skipping image rendering")
        return 0
    renders = [
        ("dimension", ["fig-dimension.csv"], "fig-dimension.png"),
        ("surface", ["fig-surface-a.csv", "fig-surface-b.csv",
                     "fig-surface-c.csv", "fig-surface-d.csv"], "fig-surface.png"),
        ("contour", ["fig-contour.csv"], "fig-contour.png"),
        ("appendix", ["fig-appendix.csv"], "fig-appendix.png"),
    ]
    for kind, csvs, image in renders:
        cmd = [figplot, kind, *(str(outdir / c) for c in csvs), "-o", str(outdir / image)]
        subprocess.run(cmd, check=True)
        print(f"rendered {outdir / image}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
