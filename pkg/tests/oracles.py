"""Shared numerical oracles for the test suite."""
from __future__ import annotations

import math

from dwnls.delta_well import DeltaWellParams, spectrum
from dwnls.grid_solver import DiscreteProblem, DoubleDelta, linear_doublet


def delta_grid_doublet(p: DeltaWellParams, per_a: int = 200, decay_lengths: float = 40.0) -> tuple[float, float]:
    """Richardson-extrapolated ``(E1, E2)`` of the jump-condition Hamiltonian.

    The deltas sit exactly on grid nodes, so the error is ``O(dx^2)`` and one
    extrapolation step from ``dx`` and ``dx / 2`` removes the leading term.
    """
    sp = spectrum(p)
    reach = p.a + decay_lengths / sp.kappa2
    half_width = p.a * math.ceil(reach / p.a)
    levels = []
    for refine in (1, 2):
        n = int(round(2 * half_width / p.a * per_a * refine)) + 1
        prob = DiscreteProblem(half_width=half_width, n_points=n, hbar=1.0, potential=DoubleDelta(p.a, p.alpha))
        d = linear_doublet(prob)
        levels.append((d.lambda_plus, d.lambda_minus))
    (c1, c2), (f1, f2) = levels
    return (4 * f1 - c1) / 3, (4 * f2 - c2) / 3
