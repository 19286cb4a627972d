"""Command line for rendering belltomo CSVs into figures."""
import argparse
import sys

from figs.render import KINDS, FigureSpec, render


def _build_parser():
    parser = argparse.ArgumentParser(prog="figs", description="Render belltomo result CSVs into figures.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from one or more CSVs")
    p.add_argument("--kind", required=True, choices=KINDS, help="figure kind")
    p.add_argument("--in", dest="inputs", required=True, nargs="+", metavar="CSV", help="input CSV path(s)")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--title", default=None, help="optional figure title")
    p.add_argument("--raster", action="store_true", help="write PNG instead of the default SVG")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    labels = (args.title,) if args.title else ()
    spec = FigureSpec(
        kind=args.kind,
        input_paths=tuple(args.inputs),
        output_path=args.out,
        labels=labels,
    )
    try:
        path = render(spec, raster=args.raster)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
