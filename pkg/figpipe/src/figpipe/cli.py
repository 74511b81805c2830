"""figpipe CLI: render figures from run-directory outputs.

Examples:
    figpipe render linecut rundir/linecut.csv --out fig5.png
    figpipe render momentum rundir/final.dkd rundir/peaks.csv --out fig10.png
    figpipe render scaling sweep/scaling.csv --out fig8.png
"""

import argparse
import sys

from .figures import RENDERERS, FigureSpec, render
from .io import SchemaError


def main(argv=None):
    parser = argparse.ArgumentParser(prog="figpipe")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure")
    p.add_argument("figure", choices=sorted(RENDERERS))
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out", required=True)
    p.add_argument("--floor", type=float, default=1e-12,
                   help="log-plot probability floor")
    args = parser.parse_args(argv)

    spec = FigureSpec(figure=args.figure, inputs=tuple(args.inputs),
                      output=args.out, options={"floor": args.floor})
    try:
        render(spec)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
