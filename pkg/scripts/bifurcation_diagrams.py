"""Two-mode bifurcation diagrams below and above the threshold (sigma = 1 and sigma = 5).

Writes CSV, JSON and SVG (imbalance and energy) for each sigma into ``--out``.
"""
import argparse
from pathlib import Path

from dwnls.svg import diagram_svg
from dwnls.two_level import build_diagram

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--out", type=Path, default=Path("results/diagrams"))
parser.add_argument("--n-eta", type=int, default=801)
args = parser.parse_args()
args.out.mkdir(parents=True, exist_ok=True)

for sigma, reach in ((1.0, 4.0), (5.0, 8.0)):
    diagram = build_diagram(sigma, -reach, reach, args.n_eta)
    stem = args.out / f"sigma{sigma:g}"
    stem.with_suffix(".csv").write_text(diagram.to_csv())
    stem.with_suffix(".json").write_text(diagram.to_json())
    Path(f"{stem}_z.svg").write_text(diagram_svg(diagram, "z"))
    Path(f"{stem}_energy.svg").write_text(diagram_svg(diagram, "energy"))
    crit = ", ".join(f"{k} = {v:.6g}" for k, v in diagram.critical.items() if v is not None)
    print(f"sigma = {sigma:g}: {len(diagram.branches)} points; {crit}")
