"""Command-line driver: figkit <kind> --in ... --out ...

Kinds:
  contour-pair  --in SNAPSHOT_F --in SNAPSHOT_G [--diag DIAG] --out PNG
  series        --in CSV --columns A[,B,...] [--x-column t] [--log-y] --out PNG
  momentum      --in MOMENT_CSV --out PNG
  table         --in TABLE_CSV --out PNG
  all           --in RUN_DIR --out FIG_DIR

Exit codes: 0 success, 2 bad usage or schema mismatch.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .io import SchemaError
from .jobs import (
    plot_contour_pair,
    plot_momentum_comparison,
    plot_series,
    render_table,
    run_all,
)

KINDS = ("contour-pair", "series", "momentum", "table", "all")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="figkit",
        description="Render figures from flockkit CSV output; never "
                    "recomputes physics.")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="inputs", action="append", default=[],
                        required=True, metavar="PATH",
                        help="input CSV (twice for contour-pair: f then g) "
                             "or run directory for 'all'")
    parser.add_argument("--out", required=True, type=Path,
                        help="output image (or directory for 'all')")
    parser.add_argument("--columns", default=None,
                        help="series: comma-separated y-columns")
    parser.add_argument("--x-column", default="t")
    parser.add_argument("--log-y", action="store_true")
    parser.add_argument("--diag", default=None, metavar="DIAG_CSV",
                        help="contour-pair: also require the velocity "
                             "support in this diagnostics file to contract")
    return parser


def _dispatch(args) -> list:
    kind, inputs = args.kind, args.inputs
    if kind == "contour-pair":
        if len(inputs) != 2:
            raise SchemaError("contour-pair needs --in twice (f, then g)")
        return [plot_contour_pair(inputs[0], inputs[1], args.out,
                                  diag=args.diag)]
    if kind == "series":
        if len(inputs) != 1 or not args.columns:
            raise SchemaError("series needs one --in and --columns")
        cols = tuple(c.strip() for c in args.columns.split(",") if c.strip())
        return [plot_series(inputs[0], cols, args.out,
                            x_column=args.x_column, log_y=args.log_y)]
    if kind == "momentum":
        if len(inputs) != 1:
            raise SchemaError("momentum needs exactly one --in")
        return [plot_momentum_comparison(inputs[0], args.out)]
    if kind == "table":
        if len(inputs) != 1:
            raise SchemaError("table needs exactly one --in")
        return [render_table(inputs[0], args.out)]
    # all
    if len(inputs) != 1:
        raise SchemaError("'all' needs exactly one --in run directory")
    return run_all(inputs[0], args.out)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        written = _dispatch(args)
    except SchemaError as exc:
        print(f"figkit: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
