"""Continuation of the grid stationary states against the two-mode prediction.

Follows the symmetric branch through the pitchfork (reporting the L+ negative
count and the imbalance reached from an off-centre start) and then the
asymmetric branch, printing the grid and two-mode imbalances side by side.
"""
import argparse
import warnings

import numpy as np

from dwnls import grid_solver as gs
from dwnls import two_level as tl

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--hbar", type=float, default=0.1)
parser.add_argument("--sigma", type=float, default=1.0)
args = parser.parse_args()

prob = gs.DiscreteProblem(half_width=5.0, n_points=2001, hbar=args.hbar, sigma=args.sigma)
d = gs.linear_doublet(prob)
es = tl.eta_star(args.sigma)
print(f"omega = {d.omega:.4e}, eta_star = {es:g}")

print(f"{'eta':>7} {'L+ neg':>6} {'z from 0.3':>11}")
psi = None
for eta in np.linspace(-0.8 * es, -1.2 * es, 21):
    sol = gs.solve_stationary(prob, d, float(eta), 0.0, psi0=psi)
    psi = sol.psi
    count = gs.negative_count(gs.linearized_operators(prob, sol).lowest("plus"), 1e-3 * d.omega)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        off = gs.solve_stationary(prob, d, float(eta), 0.3, max_iter=400)
    print(f"{eta:7.3f} {count:6d} {off.z:11.3e}")

print(f"\n{'eta':>7} {'label':>5} {'z grid':>10} {'z two-mode':>10} {'E grid':>10} {'E two-mode':>10}")
for eta in np.linspace(-1.1 * es, -2.0 * es, 10):
    for z, label in tl.asymmetric_points(float(eta), args.sigma):
        sol = gs.solve_stationary(prob, d, float(eta), z)
        e2 = tl.energy(sol.z, float(eta), args.sigma, tl.Phase.ZERO)
        print(f"{eta:7.3f} {label.value:>5} {sol.z:10.6f} {z:10.6f} {sol.E:10.6f} {e2:10.6f}")
