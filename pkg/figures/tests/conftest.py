"""Shared fixtures: a small but complete artifact set from the beamcat CLI.

The figures package consumes only the emitted file schema, so the tests
exercise exactly that boundary — they shell out to the installed `beamcat`
command rather than importing its internals.
"""

import json
import math
import subprocess
from pathlib import Path

import pytest

GRID = "-5,5,-5,5,41,41"
HALF_PI = math.pi / 2


def beamcat(*args):
    cmd = ["beamcat", *[str(a) for a in args]]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def artifact_set(tmp_path_factory):
    """One directory per analog figure group, plus a ready manifest."""
    root = tmp_path_factory.mktemp("artifacts")
    detector = ["--kappa", 0.75, "--t2", 0.8, "--diodes", 10, "--eta", 0.8]
    figures = []

    for m in (1, 2, 3, 4):
        d = root / f"quad_m{m}"
        beamcat("quadrature", "--alpha", 0.6, "--m", m,
                "--phi", 0.0, "--phi", HALF_PI, "--out", d)
        figures.append({
            "name": f"quadrature_m{m}", "figure_kind": "multi-line",
            "input_files": [str(d / "quadrature_phi0.csv"),
                            str(d / f"quadrature_phi{HALF_PI:.6g}.csv")],
            "labels": ["phi = 0", "phi = pi/2"],
            "title": f"Quadrature distributions, m = {m}",
            "output_path": str(root / "img" / f"quadrature_m{m}.svg"),
        })

    for m in (1, 2, 3, 4):
        d = root / f"wigner_m{m}"
        beamcat("wigner", "--alpha", 0.6, "--m", m, "--grid", GRID,
                "--out", d)
        figures.append({
            "name": f"wigner_m{m}", "figure_kind": "surface",
            "input_files": [str(d / "wigner.csv")],
            "title": f"Wigner function, m = {m}",
            "output_path": str(root / "img" / f"wigner_m{m}.svg"),
        })

    for m in (1, 3):
        d = root / f"component_m{m}"
        beamcat("component", "--alpha", 0.6, "--m", m, "--grid", GRID,
                "--out", d)
        figures.append({
            "name": f"component_wigner_m{m}", "figure_kind": "surface",
            "input_files": [str(d / "component_wigner.csv")],
            "title": f"Component Wigner function, m = {m}",
            "output_path": str(root / "img" / f"component_wigner_m{m}.svg"),
        })

    for k in (1, 2, 3, 4):
        d = root / f"smeared_wigner_k{k}"
        beamcat("wigner", *detector, "--k", k, "--grid", GRID, "--out", d)
        figures.append({
            "name": f"smeared_wigner_k{k}", "figure_kind": "surface",
            "input_files": [str(d / "wigner.csv")],
            "title": f"Posterior-averaged Wigner function, k = {k}",
            "output_path": str(root / "img" / f"smeared_wigner_k{k}.svg"),
        })

    for k in (2, 3):
        d = root / f"smeared_quad_k{k}"
        beamcat("quadrature", *detector, "--k", k,
                "--phi", 0.0, "--phi", HALF_PI, "--out", d)
        figures.append({
            "name": f"smeared_quadrature_k{k}", "figure_kind": "multi-line",
            "input_files": [str(d / "quadrature_phi0.csv"),
                            str(d / f"quadrature_phi{HALF_PI:.6g}.csv")],
            "labels": ["phi = 0", "phi = pi/2"],
            "title": f"Posterior-averaged quadratures, k = {k}",
            "output_path":
                str(root / "img" / f"smeared_quadrature_k{k}.svg"),
        })

    d = root / "photon_dist_k2"
    beamcat("photon-dist", *detector, "--k", 2, "--out", d)
    figures.append({
        "name": "photon_dist_k2", "figure_kind": "line",
        "input_files": [str(d / "photon_dist.csv")],
        "title": "Photon-number distribution, k = 2",
        "output_path": str(root / "img" / "photon_dist_k2.svg"),
    })

    manifest = root / "figures_manifest.json"
    manifest.write_text(json.dumps({"figures": figures}, indent=2) + "\n")
    return root, manifest, figures
