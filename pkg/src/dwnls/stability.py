"""Dynamical and orbital stability of two-mode stationary points.

Dynamical stability uses the Hessian of the planar Hamiltonian at the fixed
point. Orbital stability counts negative directions of the two linearized
operators reduced to the doublet, together with the slope of the norm curve.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError, SingularPointError
from .two_level import (
    BranchPoint,
    BranchSign,
    Label,
    Phase,
    Stability,
    branch_function,
    dE_deta,
    energy,
    eta_star,
    find_saddle,
    h_function,
    h_rounding_scale,
    half_power_difference,
)

# Relative distance to a critical coupling below which it is treated as equal.
CRITICAL_RTOL = 1e-9
# Largest stationarity residual accepted for a point to count as on-branch.
ON_BRANCH_TOL = 1e-9


class SlopeSign(Enum):
    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1


@dataclass(frozen=True)
class StabilityReport:
    det_hess: float
    l_plus_negative_count: int | None
    l_minus_nonnegative: bool
    slope_sign: SlopeSign
    verdict: Stability


@dataclass(frozen=True)
class ReducedSpectrum:
    """Diagonal entries of a reduced 2x2 operator and its two eigenvalues (ascending)."""

    alpha: float
    beta: float
    mu1: float
    mu2: float


def _near(x: float, target: float) -> bool:
    return abs(x - target) <= CRITICAL_RTOL * abs(target)


def _check_on_branch(point: BranchPoint, sigma: float) -> None:
    if point.label.is_asymmetric:
        sign = BranchSign.PLUS if point.theta is Phase.ZERO else BranchSign.MINUS
        r = branch_function(point.z, point.eta, sigma, sign)
        if abs(r) > ON_BRANCH_TOL:
            raise DomainError(f"point is off its branch (residual {r:.3e})")
    elif point.z != 0.0:
        raise DomainError("symmetric and antisymmetric points sit at z = 0")


def det_hess(point: BranchPoint, sigma: float) -> float:
    """Determinant of the Hamiltonian Hessian at a stationary point (closed form per case)."""
    _check_on_branch(point, sigma)
    if point.label is Label.SYMMETRIC:
        return 1.0 + point.eta * sigma / 2.0**sigma
    if point.label is Label.ANTISYMMETRIC:
        return 1.0 - point.eta * sigma / 2.0**sigma
    z = point.z
    d = 2.0**sigma * half_power_difference(z, sigma)
    return h_function(z, sigma) / ((1.0 - z * z) * d)


def classify_dynamical(point: BranchPoint, sigma: float) -> Stability:
    """Stable where the fixed point is a centre, unstable at a saddle.

    The symmetric and antisymmetric points are stable up to and including
    ``|eta| = eta_star``. The fold of the asymmetric branch is undetermined.
    """
    if point.label is Label.SYMMETRIC:
        return Stability.STABLE if point.eta >= -eta_star(sigma) * (1 + CRITICAL_RTOL) else Stability.UNSTABLE
    if point.label is Label.ANTISYMMETRIC:
        return Stability.STABLE if point.eta <= eta_star(sigma) * (1 + CRITICAL_RTOL) else Stability.UNSTABLE
    _check_on_branch(point, sigma)
    if abs(h_function(point.z, sigma)) <= h_rounding_scale(point.z, sigma):
        return Stability.UNDETERMINED
    saddle = find_saddle(sigma)
    if saddle is not None and _near(abs(point.eta), saddle[1]):
        return Stability.UNDETERMINED
    return Stability.STABLE if det_hess(point, sigma) > 0 else Stability.UNSTABLE


def _populations(z: float) -> tuple[float, float]:
    return (1.0 + z) / 2.0, (1.0 - z) / 2.0


def _reduced_roots(alpha: float, beta: float) -> tuple[float, float]:
    # roots of mu^2 + (alpha + beta) mu + alpha beta - 1
    disc = math.sqrt((alpha - beta) ** 2 + 4.0)
    return 0.5 * (-(alpha + beta) - disc), 0.5 * (-(alpha + beta) + disc)


def l_plus_reduced(point: BranchPoint, sigma: float) -> ReducedSpectrum:
    """Reduced spectrum of the real-part linearization in units of the tunnelling rate."""
    _check_on_branch(point, sigma)
    e = energy(point.z, point.eta, sigma, point.theta)
    pr, pl = _populations(point.z)
    k = (2.0 * sigma + 1.0) * point.eta
    alpha = e - k * pr**sigma
    beta = e - k * pl**sigma
    mu1, mu2 = _reduced_roots(alpha, beta)
    return ReducedSpectrum(alpha, beta, mu1, mu2)


def l_plus_negative_count(point: BranchPoint, sigma: float) -> tuple[int | None, float, float]:
    """Number of negative reduced eigenvalues of the real-part linearization.

    Returns ``(count, mu1, mu2)``. The count is ``None`` on the symmetric branch
    at ``|eta| = eta_star``, where one eigenvalue crosses zero.
    """
    reduced = l_plus_reduced(point, sigma)
    if point.label is Label.SYMMETRIC and _near(abs(point.eta), eta_star(sigma)):
        return None, reduced.mu1, reduced.mu2
    count = int(reduced.mu1 < 0) + int(reduced.mu2 < 0)
    return count, reduced.mu1, reduced.mu2


def ell_minus_one(z: float, sigma: float) -> float:
    """``alpha * beta - 1`` on the asymmetric branch, written through ``y = (1-z)/(1+z)``.

    The factor ``q(y)`` is non-positive on [0, 1], so the whole expression is
    negative away from ``z = 0``.
    """
    z = abs(z)
    if z == 0.0 or z >= 1.0:
        raise DomainError("defined for 0 < |z| < 1")
    y = (1.0 - z) / (1.0 + z)
    q = -1.0 + y ** (2 * sigma + 1) + (1 + 2 * sigma) * y**sigma - (1 + 2 * sigma) * y ** (sigma + 1)
    d = 2.0**sigma * half_power_difference(z, sigma)
    pref = 4.0 * z * sigma * (1.0 + z) ** (2 * sigma) / ((1.0 - z * z) * d * d)
    return pref * 2.0 / (1.0 + y) * q


def l_minus_reduced(point: BranchPoint, sigma: float) -> ReducedSpectrum:
    """Reduced spectrum of the imaginary-part linearization.

    On the symmetric branch the eigenvalues are exactly 0 and 2.
    """
    _check_on_branch(point, sigma)
    e = energy(point.z, point.eta, sigma, point.theta)
    pr, pl = _populations(point.z)
    alpha = e - point.eta * pr**sigma
    beta = e - point.eta * pl**sigma
    mu1, mu2 = _reduced_roots(alpha, beta)
    return ReducedSpectrum(alpha, beta, mu1, mu2)


def slope_sign(point: BranchPoint, sigma: float) -> SlopeSign:
    """Sign of d(norm)/d(lambda), the opposite of the sign of dE/deta."""
    if point.eta >= 0:
        raise DomainError("the norm-slope criterion is set up for attractive coupling (eta < 0)")
    _check_on_branch(point, sigma)
    if not point.label.is_asymmetric:
        return SlopeSign.NEGATIVE
    try:
        d = dE_deta(point.z, sigma)
    except SingularPointError:
        return SlopeSign.ZERO
    return SlopeSign.NEGATIVE if d > 0 else SlopeSign.POSITIVE


def orbital_verdict(point: BranchPoint, sigma: float) -> StabilityReport:
    """Orbital stability from the negative-direction count and the norm slope.

    One negative direction with a decreasing norm curve means stable, one with an
    increasing curve means unstable, and two negative directions mean unstable.
    Points where the imaginary-part operator has a negative direction fall outside
    this criterion and come back undetermined.
    """
    if point.eta >= 0:
        raise DomainError("orbital verdict requires eta < 0")
    count, _, _ = l_plus_negative_count(point, sigma)
    lm = l_minus_reduced(point, sigma)
    nonneg = lm.mu1 >= -ON_BRANCH_TOL
    slope = slope_sign(point, sigma)
    report = dict(
        det_hess=det_hess(point, sigma),
        l_plus_negative_count=count,
        l_minus_nonnegative=nonneg,
        slope_sign=slope,
    )
    mag = abs(point.eta)
    saddle = find_saddle(sigma)
    at_critical = _near(mag, eta_star(sigma)) or (saddle is not None and _near(mag, saddle[1]))
    if at_critical or count is None or not nonneg or slope is SlopeSign.ZERO:
        return StabilityReport(verdict=Stability.UNDETERMINED, **report)
    if count == 2:
        verdict = Stability.UNSTABLE
    else:
        verdict = Stability.STABLE if slope is SlopeSign.NEGATIVE else Stability.UNSTABLE
    return StabilityReport(verdict=verdict, **report)
