"""Entry point: `stcsta-plots render --in out/ --format png`."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .report import render_report


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="stcsta-plots", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p_render = sub.add_parser("render", help="render the report for an output dir")
    p_render.add_argument("--in", dest="in_dir", required=True)
    p_render.add_argument("--format", choices=("png", "svg"), default="png")
    p_render.add_argument("--dest", default=None, help="image directory (default <in>/report)")
    args = parser.parse_args(argv)

    in_dir = Path(args.in_dir)
    if not in_dir.is_dir():
        print(f"error: not a directory: {in_dir}", file=sys.stderr)
        return 2
    summary = render_report(in_dir, fmt=args.format, dest=args.dest)
    for w in summary.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"wrote {len(summary.images)} images, {summary.warning_count} warnings")
    return 0


if __name__ == "__main__":
    sys.exit(main())
