"""Double-delta doublet: closed-form splitting against its small-hbar asymptote."""
import argparse

import numpy as np

from dwnls.delta_well import DeltaWellParams, spectrum, splitting, splitting_asymptote

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--a", type=float, default=1.0)
parser.add_argument("--beta", type=float, default=-1.0)
args = parser.parse_args()

print(f"{'hbar':>6} {'E1':>14} {'E2':>14} {'splitting':>12} {'asymptote':>12} {'ratio':>8}")
for h in np.arange(0.5, 0.099, -0.05):
    p = DeltaWellParams.semiclassical(args.a, args.beta, float(h))
    sp = spectrum(p)
    s, asym = splitting(p), splitting_asymptote(p)
    print(f"{h:6.2f} {sp.e1:14.6e} {sp.e2:14.6e} {s:12.4e} {asym:12.4e} {s / asym:8.5f}")
