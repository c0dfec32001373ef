"""figures <kind> --in <csv> --out <png|pdf>: regenerate plots from result CSVs."""

from __future__ import annotations

import argparse
import sys

from .io import FigureDataError, FigureSchemaError
from .render import render_median, render_normalized, render_trajectory


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures", description="Regenerate experiment figures from CSV outputs."
    )
    sub = parser.add_subparsers(dest="kind", required=True)

    traj = sub.add_parser("trajectory", help="fitness trajectory panels from trace CSVs")
    traj.add_argument(
        "--in", dest="inputs", action="append", required=True,
        help="trace CSV; repeat for one panel per run (e.g. plus and comma)",
    )
    traj.add_argument("--out", required=True)
    traj.add_argument("--cutoff", type=float, default=None,
                      help="generation cutoff; traces ending here get a cutoff marker")

    med = sub.add_parser("median", help="median generations vs n from median.csv")
    med.add_argument("--in", dest="inputs", action="append", required=True)
    med.add_argument("--out", required=True)

    norm = sub.add_parser("normalized", help="normalized runtime vs truncation point")
    norm.add_argument("--in", dest="inputs", action="append", required=True)
    norm.add_argument("--out", required=True)
    norm.add_argument("--logy", action="store_true")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    try:
        if args.kind == "trajectory":
            render_trajectory(args.inputs, args.out, cutoff=args.cutoff)
        elif args.kind == "median":
            if len(args.inputs) != 1:
                print("error: median takes exactly one --in CSV", file=sys.stderr)
                return 2
            render_median(args.inputs[0], args.out)
        else:
            if len(args.inputs) != 1:
                print("error: normalized takes exactly one --in CSV", file=sys.stderr)
                return 2
            render_normalized(args.inputs[0], args.out, logy=args.logy)
    except (FigureSchemaError, FigureDataError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return 3
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
