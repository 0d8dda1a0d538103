"""Command-line entry: figplot <kind> <csv...> -o <image>."""

from __future__ import annotations

import argparse
import sys

from .render import EXPECTED_COMMAND, FigureJob, SchemaMismatch, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figplot",
        description="Render spinmetro CSV datasets into figure images.")
    parser.add_argument("kind", choices=sorted(EXPECTED_COMMAND),
                        help="figure kind; must match the CSV metadata command")
    parser.add_argument("csv", nargs="+", help="input CSV path(s); surface takes up to 4")
    parser.add_argument("-o", "--out", required=True, help="output image path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    job = FigureJob(kind=args.kind, csv_paths=tuple(args.csv), out_path=args.out)
    try:
        out = render(job)
    except (SchemaMismatch, ValueError) as exc:
        print(f"figplot: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
