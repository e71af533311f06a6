"""``make-figures``: render a manifest of figure specs from CLI artifacts.

The manifest is a JSON document::

    {"figures": [
        {"name": "...",
         "figure_kind": "line" | "multi-line" | "surface",
         "input_files": ["path/to/artifact.csv", ...],
         "labels": ["legend text per input", ...],      (optional)
         "title": "...",
         "output_path": "out/figure.svg"},
        ...
    ]}

Relative paths are taken from the working directory, matching how the
artifact-generation script records them.  ``--dump DIR`` skips rendering and
re-emits every ingested input byte-identically (the documented 17-significant
-digit float formatting), which is the no-silent-mutation guarantee.  Any
schema mismatch exits nonzero with a message naming the offending column.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .reader import SchemaError, dump_artifact, read_artifact

_REQUIRED = ("figure_kind", "input_files", "output_path")


@dataclass(frozen=True)
class FigureSpec:
    figure_kind: str
    input_files: list
    output_path: str
    name: str = ""
    title: str = ""
    labels: list = field(default_factory=list)


def load_manifest(path: Path) -> list:
    try:
        payload = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise SchemaError(f"manifest {path} does not exist")
    except json.JSONDecodeError as exc:
        raise SchemaError(f"manifest {path} is not valid JSON: {exc}")
    if not isinstance(payload, dict) or "figures" not in payload:
        raise SchemaError(f"manifest {path} must be an object with a "
                          f"'figures' list")
    specs = []
    for i, entry in enumerate(payload["figures"]):
        missing = [key for key in _REQUIRED if key not in entry]
        if missing:
            raise SchemaError(f"manifest entry {i} lacks required field(s) "
                              f"{', '.join(missing)}")
        known = {k: v for k, v in entry.items()
                 if k in ("figure_kind", "input_files", "output_path",
                          "name", "title", "labels")}
        specs.append(FigureSpec(**known))
    return specs


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="make-figures",
        description="Render beamcat CLI artifacts into figures.")
    ap.add_argument("manifest", type=Path, help="figure manifest JSON")
    ap.add_argument("--raster", action="store_true",
                    help="write PNG instead of the default vector SVG")
    ap.add_argument("--dump", type=Path, default=None, metavar="DIR",
                    help="re-emit ingested inputs byte-identically and exit")
    args = ap.parse_args(argv)

    try:
        specs = load_manifest(args.manifest)
        if args.dump is not None:
            seen = set()
            for spec in specs:
                for input_file in spec.input_files:
                    if input_file in seen:
                        continue
                    seen.add(input_file)
                    art = read_artifact(input_file)
                    # mirror the input path below the dump root so files of
                    # the same name from different runs cannot collide
                    rel = Path(input_file)
                    if rel.is_absolute():
                        rel = Path(*rel.parts[1:])
                    target = dump_artifact(art, args.dump / rel)
                    print(target)
            return 0
        # matplotlib import is deferred so --dump stays light
        from .render import render
        for spec in specs:
            print(render(spec, raster=args.raster))
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
