"""Exactly solvable double-delta well ``-d^2/dx^2`` with point interactions at ``x = -a, a``.

At each centre the derivative jumps by ``alpha`` times the value,
``psi'(x0+) - psi'(x0-) = alpha psi(x0)``, with ``alpha = beta / hbar^2 < 0``
for an attractive well. Bound states come from the principal Lambert W branch.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, SingularPointError

_INV_E = math.exp(-1.0)


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert W function on ``[-1/e, inf)``, by Halley iteration."""
    if math.isnan(x):
        raise DomainError("nan argument")
    if x < -_INV_E:
        if x > -_INV_E - 1e-15:
            x = -_INV_E
        else:
            raise DomainError(f"W0 is real only for x >= -1/e, got {x}")
    if x == 0.0:
        return 0.0
    if x == -_INV_E:
        return -1.0
    if x < -0.3:
        # series around the branch point
        p = math.sqrt(max(0.0, 2.0 * (math.e * x + 1.0)))
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3
    elif x < 3.0:
        w = math.log1p(x) * (1.0 - math.log1p(math.log1p(x)) / (2.0 + math.log1p(x)))
    else:
        lx = math.log(x)
        w = lx - math.log(lx)
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if denom == 0.0:
            break
        dw = f / denom
        w -= dw
        if abs(dw) <= 1e-16 * (1.0 + abs(w)):
            break
    return w


@dataclass(frozen=True)
class DeltaWellParams:
    a: float
    alpha: float
    beta: float | None = None
    hbar: float | None = None

    @classmethod
    def semiclassical(cls, a: float, beta: float, hbar: float) -> "DeltaWellParams":
        return cls(a=a, alpha=beta / hbar**2, beta=beta, hbar=hbar)

    def __post_init__(self):
        if self.a <= 0:
            raise DomainError("half-separation a must be positive")
        if self.alpha >= 0:
            raise DomainError("alpha must be negative (attractive wells)")


@dataclass(frozen=True)
class DeltaWellSpectrum:
    e1: float
    e2: float | None
    k1: complex
    k2: complex | None
    c1: float
    c2: float | None

    @property
    def kappa1(self) -> float:
        return abs(self.k1)

    @property
    def kappa2(self) -> float | None:
        return None if self.k2 is None else abs(self.k2)


def odd_state_exists(p: DeltaWellParams) -> bool:
    """The odd bound state exists iff ``a > -1/alpha``."""
    return p.a * p.alpha < -1.0


def _w_values(p: DeltaWellParams) -> tuple[float, float | None]:
    """``W0(-s e^s)`` and, when the odd state exists, ``W0(s e^s)``, with ``s = a alpha``."""
    s = p.a * p.alpha
    w1 = lambert_w0(-s * math.exp(s))
    w2 = lambert_w0(s * math.exp(s)) if odd_state_exists(p) else None
    return w1, w2


def _log_abs_w(w: float, s: float) -> float:
    """``log |W0(+-s e^s)|``; once ``e^s`` underflows, ``W(x) ~ x`` gives ``log(-s) + s``."""
    return math.log(abs(w)) if abs(w) > 1e-280 else math.log(-s) + s


def _exp_or_inf(v: float) -> float:
    return math.exp(v) if v < 709.0 else math.inf


def _log_normalization(p: DeltaWellParams, kappa: float, w: float) -> float:
    """``log C`` with ``C = kappa / sqrt(|w (w + 1)| / a)``."""
    return math.log(kappa) + 0.5 * math.log(p.a) - 0.5 * (_log_abs_w(w, p.a * p.alpha) + math.log1p(w))


def spectrum(p: DeltaWellParams) -> DeltaWellSpectrum:
    """Closed-form bound-state energies, wavenumbers and normalization constants.

    With ``s = a alpha`` and ``w`` the matching Lambert value, ``2 kappa a = w - s``.
    The normalization radicands ``(2 kappa + alpha)(2 kappa a + s + 1)`` then
    reduce to ``w (w + 1) / a``, which avoids the cancellation in ``2 kappa + alpha``
    for strongly separated wells. ``C`` grows like ``e^(-s/2)`` and is ``inf``
    once that overflows; the eigenfunctions are evaluated in log form and stay finite.
    """
    a, s = p.a, p.a * p.alpha
    w1, w2 = _w_values(p)
    kappa1 = (w1 - s) / (2.0 * a)
    c1 = _exp_or_inf(_log_normalization(p, kappa1, w1))
    e2 = k2 = c2 = None
    if w2 is not None:
        # the radicand -w2 (w2 + 1) / a is positive exactly when -1 < w2 < 0
        if not -1.0 < w2 <= 0.0:
            raise SingularPointError(f"odd-state normalization radicand is not positive (w2 = {w2!r})")
        kappa2 = (w2 - s) / (2.0 * a)
        e2 = -kappa2 * kappa2
        k2 = 1j * kappa2
        c2 = _exp_or_inf(_log_normalization(p, kappa2, w2))
    return DeltaWellSpectrum(-kappa1 * kappa1, e2, 1j * kappa1, k2, c1, c2)


def _mode(p: DeltaWellParams, j: int) -> tuple[float, float, float, float]:
    """``(kappa, log C, parity, log of C times the inner amplitude)`` of bound state ``j``."""
    w1, w2 = _w_values(p)
    s = p.a * p.alpha
    if j == 1:
        parity, w = 1.0, w1
    elif j == 2:
        if w2 is None:
            raise DomainError("odd state does not exist for a <= -1/alpha")
        parity, w = -1.0, w2
    else:
        raise DomainError("j must be 1 or 2")
    kappa = (w - s) / (2.0 * p.a)
    log_c = _log_normalization(p, kappa, w)
    # inner amplitude (2 kappa + alpha) / (2 kappa) = w / (2 kappa a), sign absorbed by parity
    log_inner = log_c + _log_abs_w(w, s) - math.log(2.0 * kappa * p.a)
    return kappa, log_c, parity, log_inner


def eigenfunction(p: DeltaWellParams, j: int, x: np.ndarray) -> np.ndarray:
    """Normalized bound state ``j`` (1 even, 2 odd) evaluated on ``x``."""
    kappa, log_c, parity, log_inner = _mode(p, j)
    x = np.asarray(x, dtype=float)
    a = p.a
    xi = np.clip(x, -a, a)
    # for the odd state w < 0, so the inner combination is e^{-kx} - e^{kx}
    inside = np.exp(log_inner + kappa * xi) + parity * np.exp(log_inner - kappa * xi)
    inside = inside if parity > 0 else -inside
    left = np.exp(log_c + kappa * np.minimum(x, -a))
    right = parity * np.exp(log_c - kappa * np.maximum(x, a))
    return np.where(x < -a, left, np.where(x > a, right, inside))


def eigenfunction_derivative(p: DeltaWellParams, j: int, x: np.ndarray, side: int = 1) -> np.ndarray:
    """Derivative of ``eigenfunction``; at the centres ``side = +1`` / ``-1`` picks the right / left limit."""
    kappa, log_c, parity, log_inner = _mode(p, j)
    x = np.asarray(x, dtype=float)
    a = p.a
    xi = np.clip(x, -a, a)
    inside = kappa * (np.exp(log_inner + kappa * xi) - parity * np.exp(log_inner - kappa * xi))
    inside = inside if parity > 0 else -inside
    left = kappa * np.exp(log_c + kappa * np.minimum(x, -a))
    right = -parity * kappa * np.exp(log_c - kappa * np.maximum(x, a))
    in_left = (x < -a) | ((x == -a) & (side < 0))
    in_right = (x > a) | ((x == a) & (side > 0))
    return np.where(in_left, left, np.where(in_right, right, inside))


def splitting(p: DeltaWellParams) -> float:
    """Physical splitting ``hbar^2 (E2 - E1)`` (``E2 - E1`` when no hbar is set).

    Written as ``(kappa1 - kappa2)(kappa1 + kappa2)`` with the first factor taken
    from the difference of the two Lambert W values, which stays accurate when
    the splitting is many orders below the energies.
    """
    if not odd_state_exists(p):
        raise DomainError("no doublet: the odd state does not exist")
    s = p.a * p.alpha
    w1, w2 = _w_values(p)
    gap = (w1 - w2) / (2.0 * p.a)
    total = (w1 + w2 - 2.0 * s) / (2.0 * p.a)
    scale = 1.0 if p.hbar is None else p.hbar**2
    return scale * gap * total


def splitting_asymptote(p: DeltaWellParams) -> float:
    """Leading small-hbar splitting ``(beta^2 / hbar^2) exp(-a |beta| / hbar^2)``."""
    if p.hbar is None or p.beta is None:
        return p.alpha**2 * math.exp(p.a * p.alpha)
    return p.beta**2 / p.hbar**2 * math.exp(-p.a * abs(p.beta) / p.hbar**2)


def resolvent_kernel(p: DeltaWellParams, k: complex, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Kernel of ``(H - k^2)^-1`` for ``Im k > 0``, as free part plus four centre-to-centre terms."""
    if k.imag <= 0:
        raise DomainError("the kernel is defined for Im k > 0")
    sp = spectrum(p)
    k2 = k * k
    for e in (sp.e1, sp.e2):
        if e is not None and abs(k2 - e) < 1e-10:
            raise SingularPointError(f"k^2 = {k2} sits on the eigenvalue {e}")
    a, al = p.a, p.alpha
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    ik = 1j * k
    denom = 2 * k * ((2 * k + 1j * al) ** 2 + al * al * cmath.exp(4j * k * a))
    diag = al * (2 * k + 1j * al) / denom
    cross = -1j * al * al * cmath.exp(2j * k * a) / denom
    free = 1j / (2 * k) * np.exp(ik * np.abs(x - y))
    xl, xr, yl, yr = np.abs(x + a), np.abs(x - a), np.abs(y + a), np.abs(y - a)
    return (
        free
        + diag * np.exp(ik * (xl + yl))
        + cross * np.exp(ik * (xl + yr))
        + cross * np.exp(ik * (xr + yl))
        + diag * np.exp(ik * (xr + yr))
    )


# ---------------------------------------------------------------------------
# independent check: transfer the decaying tail across both centres


def _shooting_mismatch(kappa: float, a: float, alpha: float) -> float:
    """Coefficient of the growing exponential left of ``-a`` for trial decay ``kappa``.

    Start from ``exp(-kappa x)`` right of ``a``, apply the derivative jump, carry
    the solution through the inner region, apply the second jump, and read off
    the ``exp(-kappa x)`` component, which must vanish for a bound state.
    """
    u, du = math.exp(-kappa * a), -kappa * math.exp(-kappa * a)
    du -= alpha * u  # left limit at +a
    # write u = A e^{kx} + B e^{-kx} near +a, carry to -a
    A = 0.5 * (u + du / kappa) * math.exp(-kappa * a)
    B = 0.5 * (u - du / kappa) * math.exp(kappa * a)
    u_l = A * math.exp(-kappa * a) + B * math.exp(kappa * a)
    du_l = kappa * (A * math.exp(-kappa * a) - B * math.exp(kappa * a))
    du_l -= alpha * u_l  # left limit at -a
    # component of e^{-kx} to the left of -a, rescaled by e^{-2 kappa a}
    growing = 0.5 * (u_l - du_l / kappa) * math.exp(-kappa * a)
    return growing


def shooting_energies(p: DeltaWellParams, n_scan: int = 4000) -> list[float]:
    """Bound-state energies from sign changes of the shooting mismatch, ascending."""
    a, al = p.a, p.alpha
    kmax = abs(al) * 1.01 + 1.0
    ks = np.linspace(1e-9, kmax, n_scan)
    vals = [_shooting_mismatch(float(k), a, al) for k in ks]
    out = []
    from scipy.optimize import brentq

    for i in range(len(ks) - 1):
        if vals[i] == 0.0:
            out.append(float(ks[i]))
        elif vals[i] * vals[i + 1] < 0:
            kk = brentq(_shooting_mismatch, ks[i], ks[i + 1], args=(a, al), xtol=1e-15, rtol=1e-15)
            out.append(kk)
    if not out:
        raise ConvergenceError("no bound state found by shooting")
    return sorted(-k * k for k in out)
