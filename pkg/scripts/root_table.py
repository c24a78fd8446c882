"""Positive-root counts of the fold polynomial against the sign-change bound, over a sigma sweep."""
import argparse

from dwnls.root_count import budan_fourier_bound, count_roots_oracle
from dwnls.two_level import bifurcation_type, sigma_threshold

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--sigmas", type=lambda s: [float(v) for v in s.split(",")],
                    default=[0.25, 0.5, 1, 1.5, 2, 2.5, 3, 3.3, sigma_threshold(), 3.31, 4, 5, 7.5, 10])
args = parser.parse_args()

print(f"{'sigma':>12} {'roots':>5} {'at 1':>5} {'bound':>5}  {'method':<16} {'type':<13} simple roots")
for s in args.sigmas:
    bound = budan_fourier_bound(s)
    oracle = count_roots_oracle(s)
    roots = " ".join(f"{r:.6g}" for r in oracle.simple_roots)
    print(f"{s:12.9g} {oracle.n_total:5d} {oracle.n_at_one:5d} {bound.bf_bound:5d}  "
          f"{bound.method.value:<16} {bifurcation_type(s).value:<13} {roots}")
