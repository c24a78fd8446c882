"""Two-mode reduction of the double-well NLS: branches, critical couplings, diagrams.

The population imbalance ``z`` lives in [-1, 1] and the relative phase is
either 0 or pi on stationary states. Coupling ``eta`` is the nonlinearity
strength measured in units of the linear tunnelling rate.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._numerics import bisect_newton, dumps_json, fmt
from .errors import DomainError, SingularPointError

# Saddle search interval for eta'(z) = 0.
SADDLE_Z_MIN = 1e-6
SADDLE_Z_MAX = 1.0 - 1e-9


class Phase(Enum):
    ZERO = 0
    PI = 1

    @property
    def angle(self) -> float:
        return 0.0 if self is Phase.ZERO else math.pi

    @property
    def cos(self) -> int:
        return 1 if self is Phase.ZERO else -1


class BranchSign(Enum):
    PLUS = 1
    MINUS = -1


class Label(Enum):
    SYMMETRIC = "s"
    ANTISYMMETRIC = "a"
    ASYM = "as"
    ASYM1 = "as1"
    ASYM2 = "as2"

    @property
    def is_asymmetric(self) -> bool:
        return self in (Label.ASYM, Label.ASYM1, Label.ASYM2)


class Stability(Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class BranchPoint:
    z: float
    theta: Phase
    eta: float
    energy: float
    label: Label
    stability: Stability = Stability.UNDETERMINED


@dataclass
class BifurcationDiagram:
    sigma: float
    eta_grid: list[float]
    branches: list[BranchPoint]
    critical: dict[str, float | None] = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["eta", "branch_label", "z", "theta", "energy", "stability"])
        for p in self.branches:
            writer.writerow(
                [fmt(p.eta), p.label.value, fmt(p.z), fmt(p.theta.angle), fmt(p.energy), p.stability.value]
            )
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "sigma": float(self.sigma),
            "critical": {k: (None if v is None else float(v)) for k, v in self.critical.items()},
            "branches": [
                {
                    "eta": p.eta,
                    "branch_label": p.label.value,
                    "z": p.z,
                    "theta": p.theta.angle,
                    "energy": p.energy,
                    "stability": p.stability.value,
                }
                for p in self.branches
            ],
        }
        return dumps_json(doc)


# ---------------------------------------------------------------------------
# closed forms


def eta_star(sigma: float) -> float:
    """Coupling at which the asymmetric branch leaves z = 0: ``2**sigma / sigma``."""
    if sigma <= 0:
        raise DomainError("sigma must be positive")
    return 2.0**sigma / sigma


def sigma_threshold() -> float:
    """Nonlinearity exponent separating super- and subcritical pitchforks."""
    return (3.0 + math.sqrt(13.0)) / 2.0


def eta_second_limit(sigma: float) -> float:
    """Limit of eta''(z) as z -> 0+; changes sign at the threshold exponent."""
    return -(2.0**sigma / (3.0 * sigma)) * (sigma * sigma - 3.0 * sigma - 1.0)


class BifurcationType(Enum):
    SUPERCRITICAL = "supercritical"
    SUBCRITICAL = "subcritical"
    DEGENERATE = "degenerate"


# exponents this close to the threshold are classified as the threshold itself
THRESHOLD_RESOLUTION = 1e-8


def bifurcation_type(sigma: float) -> BifurcationType:
    """Pitchfork type at ``eta_star``, read off the sign of ``eta_second_limit``."""
    if sigma <= 0:
        raise DomainError("sigma must be positive")
    if abs(sigma - sigma_threshold()) <= THRESHOLD_RESOLUTION:
        return BifurcationType.DEGENERATE
    return BifurcationType.SUPERCRITICAL if eta_second_limit(sigma) > 0 else BifurcationType.SUBCRITICAL


def _check_z(z: float) -> None:
    if not (-1.0 <= z <= 1.0) or math.isnan(z):
        raise DomainError(f"|z| must not exceed 1, got {z}")


def half_power_difference(z: float, sigma: float) -> float:
    """``((1+z)/2)**sigma - ((1-z)/2)**sigma`` without cancellation near z = 0."""
    _check_z(z)
    if z < 0:
        return -half_power_difference(-z, sigma)
    if z < 0.5:
        log_ratio = 2.0 * math.atanh(z)
        return ((1.0 - z) / 2.0) ** sigma * math.expm1(sigma * log_ratio)
    return ((1.0 + z) / 2.0) ** sigma - ((1.0 - z) / 2.0) ** sigma


def half_power_sum(z: float, sigma: float) -> float:
    _check_z(z)
    return ((1.0 + z) / 2.0) ** sigma + ((1.0 - z) / 2.0) ** sigma


def branch_function(z: float, eta: float, sigma: float, sign: BranchSign) -> float:
    """Stationarity residual on the phase-0 (``PLUS``) or phase-pi (``MINUS``) line."""
    _check_z(z)
    s = sign.value
    return z + s * eta * math.sqrt(1.0 - z * z) / 2.0 * half_power_difference(z, sigma)


def eta_of_z(z: float, sigma: float) -> float:
    """Positive coupling magnitude at which ``z`` is an asymmetric stationary point.

    Even in ``z``. Undefined at ``z = 0`` (limit ``eta_star``) and at ``|z| = 1``.
    """
    _check_z(z)
    if z == 0.0 or abs(z) == 1.0:
        raise DomainError(f"eta(z) undefined at z = {z}")
    z = abs(z)
    return 2.0 * z / math.sqrt(1.0 - z * z) / half_power_difference(z, sigma)


def _g(z: float, sigma: float) -> float:
    return (sigma * z * z - sigma * z + 1.0) * (1.0 + z) ** sigma


def _g_prime(z: float, sigma: float) -> float:
    return (2.0 * sigma * z - sigma) * (1.0 + z) ** sigma + sigma * (sigma * z * z - sigma * z + 1.0) * (
        1.0 + z
    ) ** (sigma - 1.0)


def h_function(z: float, sigma: float) -> float:
    """Numerator of eta'(z); odd in z, vanishes to third order at the origin."""
    _check_z(z)
    if z < 0:
        return -h_function(-z, sigma)
    if z < 0.5:
        # (1-z)^s [expm1(s L)(s z^2 - s z + 1) - 2 s z] with L = log((1+z)/(1-z))
        em = math.expm1(sigma * 2.0 * math.atanh(z))
        return (1.0 - z) ** sigma * (em * (sigma * z * z - sigma * z + 1.0) - 2.0 * sigma * z)
    return _g(z, sigma) - _g(-z, sigma)


def h_prime(z: float, sigma: float) -> float:
    _check_z(z)
    return _g_prime(z, sigma) + _g_prime(-z, sigma)


def h_rounding_scale(z: float, sigma: float) -> float:
    """Size of the rounding error in ``h_function`` at ``z``."""
    z = abs(z)
    if z >= 0.5:
        # the quadratic factor of g cancels internally near the fold, so bound its terms separately
        scale = (sigma * z * z + sigma * z + 1.0) * ((1.0 + z) ** sigma + (1.0 - z) ** sigma)
    else:
        scale = 4.0 * sigma * z + 1e-300
    return 64.0 * np.finfo(float).eps * scale


def q_function(z: float, sigma: float) -> float:
    """Numerator of dE/deta on the asymmetric branch; odd and increasing in z."""
    _check_z(z)
    if z < 0:
        return -q_function(-z, sigma)
    n = 2.0 * sigma + 1.0
    if z < 0.5:
        diff = (1.0 - z) ** n * math.expm1(n * 2.0 * math.atanh(z))
    else:
        diff = (1.0 + z) ** n - (1.0 - z) ** n
    return diff - (4.0 * sigma + 2.0) * z * (1.0 - z * z) ** sigma


def h_and_Q(z: float, sigma: float) -> tuple[float, float]:
    return h_function(z, sigma), q_function(z, sigma)


def eta_prime(z: float, sigma: float) -> float:
    """Analytic derivative of ``eta_of_z`` on (0, 1)."""
    _check_z(z)
    if z == 0.0 or abs(z) == 1.0:
        raise DomainError(f"eta'(z) undefined at z = {z}")
    sgn = 1.0 if z > 0 else -1.0
    z = abs(z)
    d = 2.0**sigma * half_power_difference(z, sigma)
    return sgn * 2.0 ** (sigma + 1.0) * h_function(z, sigma) / ((1.0 - z * z) ** 1.5 * d * d)


def energy(z: float, eta: float, sigma: float, theta: Phase) -> float:
    """Two-mode energy of a stationary point with imbalance ``z`` and phase ``theta``."""
    _check_z(z)
    return -theta.cos * math.sqrt(1.0 - z * z) + eta * (
        ((1.0 + z) / 2.0) ** (sigma + 1.0) + ((1.0 - z) / 2.0) ** (sigma + 1.0)
    )


def dE_deta(z: float, sigma: float) -> float:
    """Derivative of the energy with respect to the coupling along a branch.

    ``z = 0`` gives the symmetric-branch value ``2**-sigma``; elsewhere the
    asymmetric-branch ratio of ``q_function`` to ``h_function``.
    """
    _check_z(z)
    if z == 0.0:
        return 2.0**-sigma
    h = h_function(z, sigma)
    if abs(h) <= h_rounding_scale(z, sigma):
        raise SingularPointError(f"dE/deta is singular at the fold z = {z}")
    return q_function(z, sigma) / (2.0 ** (sigma + 1.0) * h)


def find_saddle(sigma: float) -> tuple[float, float] | None:
    """Fold of the asymmetric branch, ``(z_plus, eta_plus)``, or ``None`` below threshold.

    ``h`` is negative between 0 and the fold and positive after it. The scan runs
    from the right so that rounding noise in ``h`` at tiny ``z`` cannot fake a crossing.
    """
    if sigma <= sigma_threshold():
        return None
    grid = np.geomspace(SADDLE_Z_MIN, SADDLE_Z_MAX, 4000)
    values = [h_function(float(z), sigma) for z in grid]
    neg = [i for i, v in enumerate(values) if v < 0]
    if not neg:
        # fold below the scan start: too close to threshold to resolve
        raise SingularPointError(f"fold for sigma = {sigma} lies below z = {SADDLE_Z_MIN}")
    i = neg[-1]
    if i + 1 >= len(grid):
        raise SingularPointError("h has no sign change on the saddle interval")
    lo, hi = float(grid[i]), float(grid[i + 1])
    z_plus = bisect_newton(lambda t: h_function(t, sigma), lambda t: h_prime(t, sigma), lo, hi)
    return z_plus, eta_of_z(z_plus, sigma)


def solve_eta_of_z(target: float, sigma: float, lo: float, hi: float) -> float:
    """Solve ``eta_of_z(z) = target`` for z in ``[lo, hi]`` (a monotone stretch)."""
    f = lambda t: eta_of_z(t, sigma) - target  # noqa: E731
    return bisect_newton(f, lambda t: eta_prime(t, sigma), lo, hi)


_Z_TINY = 1e-12
# couplings this close (relative) to the fold are treated as the fold itself
FOLD_RTOL = 1e-12
_Z_EDGE = math.nextafter(1.0, 0.0)


def asymmetric_points(eta: float, sigma: float) -> list[tuple[float, Label]]:
    """Positive imbalances of the asymmetric stationary points at coupling ``eta``.

    The mirror points at ``-z`` exist as well and are not listed.
    """
    mag = abs(eta)
    es = eta_star(sigma)
    saddle = find_saddle(sigma)
    out: list[tuple[float, Label]] = []
    if saddle is None:
        if mag > es:
            out.append((solve_eta_of_z(mag, sigma, _Z_TINY, _Z_EDGE), Label.ASYM))
        return out
    z_plus, eta_plus = saddle
    if abs(mag - eta_plus) <= FOLD_RTOL * eta_plus:
        out.append((z_plus, Label.ASYM1))
    elif mag > eta_plus:
        out.append((solve_eta_of_z(mag, sigma, z_plus, _Z_EDGE), Label.ASYM1))
        if mag < es:
            out.append((solve_eta_of_z(mag, sigma, _Z_TINY, z_plus), Label.ASYM2))
    return out


def stationary_points(eta: float, sigma: float) -> list[BranchPoint]:
    """All stationary points at coupling ``eta``, without stability annotation."""
    pts = [
        BranchPoint(0.0, Phase.ZERO, eta, energy(0.0, eta, sigma, Phase.ZERO), Label.SYMMETRIC),
        BranchPoint(0.0, Phase.PI, eta, energy(0.0, eta, sigma, Phase.PI), Label.ANTISYMMETRIC),
    ]
    # attractive coupling localizes with phase 0, repulsive with phase pi
    theta = Phase.ZERO if eta < 0 else Phase.PI
    for z, label in asymmetric_points(eta, sigma):
        for zz in (-z, z):
            pts.append(BranchPoint(zz, theta, eta, energy(zz, eta, sigma, theta), label))
    return pts


def build_diagram(sigma: float, eta_min: float, eta_max: float, n_eta: int) -> BifurcationDiagram:
    """Sample every branch on a uniform coupling grid and classify its dynamical stability."""
    from .stability import classify_dynamical

    if n_eta < 1:
        raise DomainError("n_eta must be at least 1")
    grid = [float(e) for e in np.linspace(eta_min, eta_max, n_eta)]
    points: list[BranchPoint] = []
    for eta in grid:
        for p in stationary_points(eta, sigma):
            points.append(
                BranchPoint(p.z, p.theta, p.eta, p.energy, p.label, classify_dynamical(p, sigma))
            )
    points.sort(key=lambda p: (p.eta, p.z, p.theta.value))
    saddle = find_saddle(sigma)
    critical = {
        "eta_star": eta_star(sigma),
        "eta_plus": None if saddle is None else saddle[1],
        "z_plus": None if saddle is None else saddle[0],
        "sigma_threshold": sigma_threshold(),
    }
    return BifurcationDiagram(sigma, grid, points, critical)
