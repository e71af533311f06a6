"""Parsing of the documented CSV artifact schema.

A valid artifact is:

    # key=value key=value ...          <- parameter echo (verbatim subtitle)
    col_a,col_b,...                    <- header row
    1,0.25,...                         <- float data rows

Every failure raises :class:`SchemaError` with a message that names the
offending column (or structural element), so the CLI can exit nonzero with a
useful diagnostic.  Floats are re-emitted with 17 significant digits, the
same rule the producer uses, which makes ``dump`` round-trips byte-exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class SchemaError(Exception):
    """An input file does not match the documented artifact schema."""


@dataclass(frozen=True)
class Artifact:
    path: Path
    echo: str                 # the '#' line, verbatim
    header: list
    columns: dict             # name -> float ndarray


def read_artifact(path) -> Artifact:
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"{path}: input file does not exist")
    lines = path.read_text().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise SchemaError(f"{path}: missing '#' parameter echo line")
    echo = lines[0]
    if len(lines) < 2 or not lines[1].strip():
        raise SchemaError(f"{path}: missing header row")
    header = lines[1].split(",")
    rows = [ln.split(",") for ln in lines[2:] if ln]
    if not rows:
        raise SchemaError(f"{path}: empty grid (no data rows)")
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise SchemaError(
                f"{path}: row {i + 1} has {len(row)} fields, header names "
                f"{len(header)} columns ({', '.join(header)})")
    columns = {}
    for j, name in enumerate(header):
        try:
            columns[name] = np.array([float(row[j]) for row in rows])
        except ValueError:
            raise SchemaError(f"{path}: column {name!r} failed to parse "
                              f"as floats")
    return Artifact(path=path, echo=echo, header=header, columns=columns)


def format_float(value: float) -> str:
    """The producer's float formatting: 17 significant digits."""
    return f"{float(value):.17g}"


def dump_artifact(art: Artifact, target: Path) -> Path:
    """Re-emit the ingested values under the documented formatting."""
    lines = [art.echo, ",".join(art.header)]
    n_rows = art.columns[art.header[0]].size
    for i in range(n_rows):
        lines.append(",".join(format_float(art.columns[name][i])
                              for name in art.header))
    target = Path(target)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text("\n".join(lines) + "\n")
    return target


def surface_grid(art: Artifact):
    """Check and reshape an (x, p, value) artifact to plottable arrays."""
    for name in ("x", "p", "value"):
        if name not in art.columns:
            raise SchemaError(f"{art.path}: surface input lacks column "
                              f"{name!r} (has {', '.join(art.header)})")
    xs = np.unique(art.columns["x"])
    ps = np.unique(art.columns["p"])
    if xs.size * ps.size != art.columns["value"].size:
        raise SchemaError(f"{art.path}: column 'value' has "
                          f"{art.columns['value'].size} entries, not a "
                          f"complete {xs.size} x {ps.size} grid")
    values = art.columns["value"].reshape(xs.size, ps.size)
    return xs, ps, values


def curve(art: Artifact):
    """Check and extract a two-column (abscissa, ordinate) artifact."""
    if len(art.header) != 2:
        raise SchemaError(f"{art.path}: line input needs exactly two "
                          f"columns, got ({', '.join(art.header)})")
    return art.columns[art.header[0]], art.columns[art.header[1]]
