#!/usr/bin/env python3
"""Drive the beamcat CLI to produce the complete artifact set.

Produces, under --out:

  quad_m{1..4}/          quadrature distributions at four phases (pure m)
  wigner_m{1..4}/        Wigner grids for the heralded states
  component_m{1,3}/      one superposition branch: state + Wigner + Husimi
  smeared_wigner_k{1..4}/  posterior-averaged Wigner after realistic counting
  smeared_quad_k{2,3}/   posterior-averaged quadratures at phi = 0, pi/2
  photon_dist_k2/        detected photon-number distribution
  verify/                machine-readable cross-check report
  figures_manifest.json  ready-to-render manifest for `make-figures`

Everything is emitted through the CLI so these files exercise exactly the
interface downstream consumers see.
"""

import argparse
import json
import math
import subprocess
import sys
from pathlib import Path

PHASES = (0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4)
PHASE_NAMES = ("0", "pi/4", "pi/2", "3pi/4")
GRID = "-5,5,-5,5,161,161"


def run_cli(*args):
    cmd = [sys.executable, "-m", "beamcat.cli", *[str(a) for a in args]]
    subprocess.run(cmd, check=True, stdout=subprocess.DEVNULL)


def quadrature_file(directory: Path, phi: float) -> str:
    return str(directory / f"quadrature_phi{phi:.6g}.csv")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("artifacts"))
    ap.add_argument("--figures-out", type=Path, default=Path("figures_out"),
                    help="output directory recorded in the figure manifest")
    ap.add_argument("--kappa", type=float, default=0.75)
    ap.add_argument("--t2", type=float, default=0.8)
    ap.add_argument("--diodes", type=int, default=10)
    ap.add_argument("--eta", type=float, default=0.8)
    args = ap.parse_args()

    alpha = args.kappa * args.t2
    out = args.out
    figures = []
    detector = ["--kappa", args.kappa, "--t2", args.t2,
                "--diodes", args.diodes, "--eta", args.eta]

    # conditional quadrature distributions, one panel per heralded m
    for m in (1, 2, 3, 4):
        d = out / f"quad_m{m}"
        run_cli("quadrature", "--alpha", alpha, "--m", m,
                *sum((["--phi", p] for p in PHASES), []), "--out", d)
        figures.append({
            "name": f"quadrature_m{m}",
            "figure_kind": "multi-line",
            "input_files": [quadrature_file(d, p) for p in PHASES],
            "labels": [f"phi = {n}" for n in PHASE_NAMES],
            "title": f"Quadrature distributions, heralded m = {m}",
            "output_path": str(args.figures_out / f"quadrature_m{m}.svg"),
        })

    # Wigner functions of the heralded states
    for m in (1, 2, 3, 4):
        d = out / f"wigner_m{m}"
        run_cli("wigner", "--alpha", alpha, "--m", m, "--grid", GRID,
                "--out", d)
        figures.append({
            "name": f"wigner_m{m}",
            "figure_kind": "surface",
            "input_files": [str(d / "wigner.csv")],
            "title": f"Wigner function, heralded m = {m}",
            "output_path": str(args.figures_out / f"wigner_m{m}.svg"),
        })

    # one branch of the two-component superposition
    for m in (1, 3):
        d = out / f"component_m{m}"
        run_cli("component", "--alpha", alpha, "--m", m, "--grid", GRID,
                "--out", d)
        figures.append({
            "name": f"component_wigner_m{m}",
            "figure_kind": "surface",
            "input_files": [str(d / "component_wigner.csv")],
            "title": f"Component-state Wigner function, m = {m}",
            "output_path":
                str(args.figures_out / f"component_wigner_m{m}.svg"),
        })

    # posterior-averaged (detection-smeared) Wigner functions
    for k in (1, 2, 3, 4):
        d = out / f"smeared_wigner_k{k}"
        run_cli("wigner", *detector, "--k", k, "--grid", GRID, "--out", d)
        figures.append({
            "name": f"smeared_wigner_k{k}",
            "figure_kind": "surface",
            "input_files": [str(d / "wigner.csv")],
            "title": f"Posterior-averaged Wigner function, k = {k} clicks",
            "output_path": str(args.figures_out / f"smeared_wigner_k{k}.svg"),
        })

    # posterior-averaged quadratures: lobes (phi = 0) vs fringes (phi = pi/2)
    for k in (2, 3):
        d = out / f"smeared_quad_k{k}"
        run_cli("quadrature", *detector, "--k", k,
                "--phi", 0.0, "--phi", math.pi / 2, "--out", d)
        figures.append({
            "name": f"smeared_quadrature_k{k}",
            "figure_kind": "multi-line",
            "input_files": [quadrature_file(d, 0.0),
                            quadrature_file(d, math.pi / 2)],
            "labels": ["phi = 0", "phi = pi/2"],
            "title": f"Posterior-averaged quadratures, k = {k} clicks",
            "output_path":
                str(args.figures_out / f"smeared_quadrature_k{k}.svg"),
        })

    # detected photon-number distribution (single-curve figure)
    d = out / "photon_dist_k2"
    run_cli("photon-dist", *detector, "--k", 2, "--out", d)
    figures.append({
        "name": "photon_dist_k2",
        "figure_kind": "line",
        "input_files": [str(d / "photon_dist.csv")],
        "title": "Photon-number distribution after k = 2 clicks",
        "output_path": str(args.figures_out / "photon_dist_k2.svg"),
    })

    run_cli("verify", "--out", out / "verify")

    manifest = out / "figures_manifest.json"
    manifest.write_text(json.dumps({"figures": figures}, indent=2,
                                   sort_keys=True) + "\n")
    print(f"wrote {len(figures)} figure specs to {manifest}")


if __name__ == "__main__":
    main()
