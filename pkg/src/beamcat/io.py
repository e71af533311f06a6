"""Deterministic artifact serialization.

Every data file starts with a single ``#``-prefixed parameter-echo line
(stable key order, shortest round-trip float formatting), followed by a
header row and the data rows.  Data floats are printed with 17 significant
digits, which round-trips IEEE doubles exactly, so identical configurations
produce byte-identical files and re-ingested artifacts reproduce the
in-memory values bit for bit.  Newlines are always ``\\n``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ConfigError

__all__ = [
    "format_value",
    "parameter_echo",
    "write_table",
    "read_table",
    "write_json",
    "read_json",
]


def format_value(value) -> str:
    """Stable text form: ints verbatim, floats with 17 significant digits."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def _echo_value(value) -> str:
    # the echo line favors readability: shortest round-trip form for floats
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (list, tuple)):
        return ",".join(_echo_value(v) for v in value)
    return format_value(value)


def parameter_echo(params: dict) -> str:
    """One ``#`` line recording all parameters, in the given key order."""
    return "# " + " ".join(f"{key}={_echo_value(val)}"
                           for key, val in params.items())


def write_table(path: Path, params: dict, header: list, rows,
                fmt: str = "csv") -> Path:
    """Write a columnar artifact as CSV (default) or an equivalent JSON."""
    path = Path(path)
    if fmt == "csv":
        lines = [parameter_echo(params), ",".join(header)]
        for row in rows:
            lines.append(",".join(format_value(v) for v in row))
        path.write_text("\n".join(lines) + "\n")
    elif fmt == "json":
        columns = list(zip(*rows)) if rows else [[] for _ in header]
        payload = {
            "params": {k: _echo_value(v) for k, v in params.items()},
            "columns": {name: [format_value(v) for v in col]
                        for name, col in zip(header, columns)},
        }
        path = path.with_suffix(".json")
        write_json(path, payload)
    else:
        raise ConfigError(f"unknown output format {fmt!r} (want csv or json)")
    return path


def read_table(path: Path):
    """Read a CSV artifact back: (params, header, columns-as-float-arrays).

    Raises ConfigError when the file lacks the echo line or a data column
    cannot be parsed; the message names the offending part.
    """
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ConfigError(f"{path}: missing '#' parameter echo line")
    params = {}
    for item in lines[0][1:].strip().split():
        if "=" in item:
            key, _, val = item.partition("=")
            params[key] = val
    if len(lines) < 2:
        raise ConfigError(f"{path}: missing header row")
    header = lines[1].split(",")
    raw_rows = [ln.split(",") for ln in lines[2:] if ln]
    columns = {}
    for j, name in enumerate(header):
        try:
            columns[name] = np.array([float(row[j]) for row in raw_rows])
        except (ValueError, IndexError):
            raise ConfigError(f"{path}: column {name!r} failed to parse")
    return params, header, columns


def write_json(path: Path, payload: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def read_json(path: Path) -> dict:
    return json.loads(Path(path).read_text())
