"""Command-line figure renderer.

    render_figure --kind <branches|yield_curve|heatmap> --in <csv>
                  [--in2 <csv>] --out <png> [--highlight 1,2] ...

Exit codes: 0 success, 2 bad request or unreadable/mismatched input.
"""
from __future__ import annotations

import argparse
import sys

from . import __version__
from .render import FigureRequest, HeaderMismatchError, render


def _pair(text: str) -> tuple[float, float]:
    lo, hi = (float(x) for x in text.split(","))
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render_figure",
        description="Render aro-sim CSV output (branches, yield curves, heatmaps) to images.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--kind", required=True, choices=("branches", "yield_curve", "heatmap"))
    parser.add_argument("--in", dest="input", required=True, help="input CSV")
    parser.add_argument("--in2", dest="input2", default=None, help="optional second curve CSV")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument(
        "--highlight",
        default=None,
        help="comma-separated 1-based branch numbers to thicken (branches only)",
    )
    parser.add_argument("--xlim", type=_pair, default=None, metavar="LO,HI")
    parser.add_argument("--ylim", type=_pair, default=None, metavar="LO,HI")
    parser.add_argument("--title", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    inputs = (args.input,) if args.input2 is None else (args.input, args.input2)
    highlight = None
    if args.highlight is not None:
        try:
            highlight = tuple(int(x) for x in args.highlight.split(","))
        except ValueError:
            print(f"error: --highlight must be integers, got {args.highlight!r}", file=sys.stderr)
            return 2
    try:
        request = FigureRequest(
            kind=args.kind,
            inputs=inputs,
            output=args.out,
            highlight=highlight,
            xlim=args.xlim,
            ylim=args.ylim,
            title=args.title,
        )
        path = render(request)
    except (HeaderMismatchError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


def entrypoint() -> None:
    raise SystemExit(main())
