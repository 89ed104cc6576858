"""Command line front end: render one figure spec, or a whole manifest."""

import argparse
import sys

from .figspec import SpecError, load_manifest, load_spec
from .render import render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots",
        description="Render figures from block Krylov experiment CSV files.")
    sub = parser.add_subparsers(dest="command", required=True)

    one = sub.add_parser("render", help="render a single figure spec")
    one.add_argument("--spec", required=True, help="figure spec JSON file")

    many = sub.add_parser("batch", help="render every figure in a manifest")
    many.add_argument("--manifest", required=True,
                      help="JSON file with a 'figures' list")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "render":
            specs = [load_spec(args.spec)]
        else:
            specs = load_manifest(args.manifest)
        for spec in specs:
            result = render(spec)
            print(f"wrote {result.path}")
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
