"""Figure rendering for beamcat CLI artifacts.

This package consumes only the emitted CSV schema (a ``#`` parameter-echo
line, a header row, float columns) and turns it into images; it never
recomputes physics quantities.
"""

from .reader import Artifact, SchemaError, read_artifact

__all__ = ["Artifact", "SchemaError", "read_artifact"]
