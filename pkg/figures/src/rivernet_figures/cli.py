"""Command line: figures render --spec PATH [--out-dir DIR]."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .render import EmptyInput, FigureSpec, MissingColumn, render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render figures from rivernet CSV artifacts",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from a JSON spec")
    p.add_argument("--spec", required=True, help="path to the figure spec (JSON)")
    p.add_argument("--out-dir", default=None,
                   help="directory for outputs (default: the spec's directory)")
    args = parser.parse_args(argv)

    spec_path = Path(args.spec)
    try:
        doc = json.loads(spec_path.read_text())
    except FileNotFoundError:
        print(json.dumps({"error": "ConfigError",
                          "message": f"no such spec: {args.spec}"}),
              file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(json.dumps({"error": "SchemaViolation",
                          "message": f"invalid JSON: {exc}"}), file=sys.stderr)
        return 2

    base = spec_path.resolve().parent
    try:
        spec = FigureSpec.from_document(doc, base_dir=base)
        if args.out_dir is not None:
            out = Path(args.out_dir).resolve() / Path(doc["out"]).name
            spec = FigureSpec(**{**spec.__dict__, "out": out})
        files = render(spec)
    except (MissingColumn, EmptyInput, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 2
    for f in files:
        print(f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
