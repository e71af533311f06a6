"""Renderers for the three figure kinds.

``line`` and ``multi-line`` overlay one curve per input file; ``surface``
draws one (x, p, value) grid as a 3-D surface.  Parameter echo lines from
every input become subtitle text verbatim, so each image records exactly
where its numbers came from.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .reader import SchemaError, curve, read_artifact, surface_grid

_STYLE = Path(__file__).parent / "style" / "beamcat.mplstyle"
_KINDS = ("line", "multi-line", "surface")


def _subtitle(fig, artifacts):
    text = "\n".join(a.echo for a in artifacts)
    fig.text(0.5, 0.005, text, ha="center", va="bottom",
             fontsize=5, family="monospace")


def _render_lines(spec, artifacts):
    fig, ax = plt.subplots()
    labels = spec.labels or [a.path.stem for a in artifacts]
    for art, label in zip(artifacts, labels):
        xs, ys = curve(art)
        ax.plot(xs, ys, label=label)
    ax.set_xlabel(artifacts[0].header[0])
    ax.set_ylabel(artifacts[0].header[1])
    if len(artifacts) > 1:
        ax.legend()
    ax.set_title(spec.title)
    return fig


def _render_surface(spec, artifacts):
    if len(artifacts) != 1:
        raise SchemaError(f"surface figure {spec.name!r} wants exactly one "
                          f"input file, got {len(artifacts)}")
    xs, ps, values = surface_grid(artifacts[0])
    fig = plt.figure()
    ax = fig.add_subplot(projection="3d")
    X, P = np.meshgrid(xs, ps, indexing="ij")
    ax.plot_surface(X, P, values, cmap=plt.rcParams["image.cmap"],
                    linewidth=0, antialiased=True)
    ax.set_xlabel("x")
    ax.set_ylabel("p")
    ax.set_zlabel(artifacts[0].header[-1])
    ax.set_title(spec.title)
    return fig


def render(spec, raster: bool = False) -> Path:
    """Render one figure spec; returns the written image path."""
    if spec.figure_kind not in _KINDS:
        raise SchemaError(f"unknown figure_kind {spec.figure_kind!r} "
                          f"(want one of {', '.join(_KINDS)})")
    if not spec.input_files:
        raise SchemaError(f"figure {spec.name!r} lists no input files")
    if spec.labels and len(spec.labels) != len(spec.input_files):
        raise SchemaError(f"figure {spec.name!r} has {len(spec.labels)} "
                          f"labels for {len(spec.input_files)} inputs")
    artifacts = [read_artifact(p) for p in spec.input_files]
    with plt.style.context(str(_STYLE)):
        if spec.figure_kind == "surface":
            fig = _render_surface(spec, artifacts)
        else:
            fig = _render_lines(spec, artifacts)
        _subtitle(fig, artifacts)
        out = Path(spec.output_path)
        if raster:
            out = out.with_suffix(".png")
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out)
        plt.close(fig)
    return out
