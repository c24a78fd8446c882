"""Counting positive roots of the fractional polynomial behind the fold condition.

With ``y = (1 - z)/(1 + z)`` the numerator of eta'(z) becomes, up to a positive
factor, ``p(y) = y^(s+2) + b y^(s+1) + a y^s - a y^2 - b y - 1`` with
``a = 1 + 2s`` and ``b = 2 - 2s``. Its positive roots are ``y = 1`` (the
symmetric point, multiplicity 3 or 5) plus a reciprocal pair above threshold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from ._numerics import dumps_json
from .errors import DomainError, OracleMismatchError
# exponents within THRESHOLD_RESOLUTION of the threshold are not resolved by a
# multiplicity test at tolerance 1e-6, so they count as the threshold itself
from .two_level import THRESHOLD_RESOLUTION, sigma_threshold


class CountMethod(Enum):
    CLASSICAL_BF = "classical_budan_fourier"
    EXTENDED_BF = "extended_budan_fourier"
    MONOTONICITY = "monotonicity"
    FACTORIZATION = "factorization"


@dataclass(frozen=True)
class FractionalPolynomial:
    """``sum_j coefficients[j] * y**exponents[j]`` with strictly increasing real exponents."""

    exponents: tuple[float, ...]
    coefficients: tuple[float, ...]

    def __post_init__(self):
        if len(self.exponents) != len(self.coefficients):
            raise ValueError("exponents and coefficients differ in length")
        if any(b <= a for a, b in zip(self.exponents, self.exponents[1:])):
            raise ValueError("exponents must be strictly increasing")

    @property
    def degree(self) -> float:
        return self.exponents[-1]

    def eval(self, y: float) -> float:
        if y <= 0:
            raise DomainError("fractional polynomials are evaluated on y > 0")
        return float(sum(c * y**r for r, c in zip(self.exponents, self.coefficients)))

    def eval_scaled(self, y: np.ndarray) -> np.ndarray:
        """``p(y) / max(1, y**degree)``: same sign as ``p``, no overflow for large y."""
        y = np.asarray(y, dtype=float)
        logy = np.log(y)
        shift = np.where(y > 1.0, self.degree, 0.0)
        out = np.zeros_like(y)
        for r, c in zip(self.exponents, self.coefficients):
            out += c * np.exp((r - shift) * logy)
        return out

    def magnitude_scaled(self, y: np.ndarray) -> np.ndarray:
        """Sum of term magnitudes on the same scale as ``eval_scaled`` (for rounding bounds)."""
        y = np.asarray(y, dtype=float)
        logy = np.log(y)
        shift = np.where(y > 1.0, self.degree, 0.0)
        out = np.zeros_like(y)
        for r, c in zip(self.exponents, self.coefficients):
            out += abs(c) * np.exp((r - shift) * logy)
        return out

    def derivative_at(self, y: float, order: int) -> float:
        """Exact ``order``-th derivative via falling factorials of the exponents."""
        total = 0.0
        for r, c in zip(self.exponents, self.coefficients):
            ff = 1.0
            for k in range(order):
                ff *= r - k
            if ff != 0.0:
                total += c * ff * y ** (r - order)
        return total

    def dense_integer_coefficients(self) -> list[int]:
        """Coefficient list ``[c_0, c_1, ...]`` when every exponent is an integer."""
        if any(r != int(r) for r in self.exponents):
            raise DomainError("exponents are not all integers")
        out = [0] * (int(self.degree) + 1)
        for r, c in zip(self.exponents, self.coefficients):
            out[int(r)] = int(round(c))
        return out


def p_sigma(sigma: float) -> FractionalPolynomial:
    """The fold polynomial for exponent ``sigma``; coinciding exponents are merged."""
    if sigma <= 0:
        raise DomainError("sigma must be positive")
    a = 1.0 + 2.0 * sigma
    b = 2.0 - 2.0 * sigma
    terms: dict[float, float] = {}
    for r, c in ((0.0, -1.0), (1.0, -b), (2.0, -a), (sigma, a), (sigma + 1.0, b), (sigma + 2.0, 1.0)):
        terms[r] = terms.get(r, 0.0) + c
    items = sorted((r, c) for r, c in terms.items() if c != 0.0)
    return FractionalPolynomial(tuple(r for r, _ in items), tuple(c for _, c in items))


def z_to_y(z: float) -> float:
    if not -1.0 < z <= 1.0:
        raise DomainError("z must lie in (-1, 1]")
    return (1.0 - z) / (1.0 + z)


def y_to_z(y: float) -> float:
    if y < 0:
        raise DomainError("y must be non-negative")
    return (1.0 - y) / (1.0 + y)


@dataclass(frozen=True)
class RootCount:
    n_total: int
    n_at_one: int
    bf_bound: int
    method: CountMethod


@dataclass(frozen=True)
class OracleCount:
    n_total: int
    n_at_one: int
    simple_roots: tuple[float, ...]


def _sign_changes(signs: list[int]) -> int:
    s = [v for v in signs if v != 0]
    return sum(1 for u, v in zip(s, s[1:]) if u != v)


def _expected_count(sigma: float) -> tuple[int, int]:
    """Closed-form ``(n_total, n_at_one)``: 3 roots below threshold, 5 from it on."""
    st = sigma_threshold()
    if sigma < st - THRESHOLD_RESOLUTION:
        return 3, 3
    if sigma <= st + THRESHOLD_RESOLUTION:
        return 5, 5
    return 5, 3



def _classical_bf(coeffs: list[int]) -> int:
    """Budan-Fourier sign-change count on (0, inf) for an integer polynomial.

    Derivatives at 0 are ``n! c_n``; every derivative has a positive leading
    coefficient at infinity (leading coefficient is 1), so v(inf) = 0.
    """
    deg = len(coeffs) - 1
    at_zero = [int(math.copysign(1, c)) if c != 0 else 0 for c in coeffs]
    at_inf = [1] * (deg + 1)
    return _sign_changes(at_zero) - _sign_changes(at_inf)


def _extended_bf_signs(sigma: float) -> list[int]:
    """Signs at y -> 0+ of the six generalized Budan-Fourier functions (non-integer sigma > 1)."""
    g0 = 2 * (sigma + 1) * (sigma + 2)
    g1 = -2 * (sigma - 1) ** 2 * (sigma + 1) * sigma
    g2 = (1 + 2 * sigma) * sigma * (sigma - 1) ** 2  # leading coefficient of y^(sigma-3)
    g3 = -2 * (1 + 2 * sigma)
    g4 = 2 * (sigma - 1)
    g5 = -1.0
    return [int(math.copysign(1, v)) for v in (g0, g1, g2, g3, g4, g5)]


def _deflate_triple_one(coeffs: list[int]) -> list[int]:
    """Exact division of an integer polynomial by (y - 1)^3 (synthetic division)."""
    c = [Fraction(v) for v in coeffs]
    for _ in range(3):
        # divide highest-first by (y - 1)
        hi_first = c[::-1]
        q = [hi_first[0]]
        for v in hi_first[1:]:
            q.append(v + q[-1])
        if q[-1] != 0:
            raise OracleMismatchError("(y - 1) does not divide the polynomial")
        c = q[:-1][::-1]
    return [int(v) for v in c]


def _positive_roots_low_degree(coeffs: list[int]) -> int:
    if len(coeffs) == 1:
        return 0
    if len(coeffs) == 2:
        c0, c1 = coeffs
        return int(-c0 / c1 > 0)
    if len(coeffs) == 3:
        c0, c1, c2 = coeffs
        disc = c1 * c1 - 4 * c0 * c2
        if disc < 0:
            return 0
        roots = [(-c1 + s * math.sqrt(disc)) / (2 * c2) for s in (1, -1)]
        return sum(1 for r in set(roots) if r > 0)
    raise DomainError("closed-form count only for degree at most 2")


def budan_fourier_bound(sigma: float) -> RootCount:
    """Upper bound on the number of positive roots, with the exact count alongside.

    Integer ``sigma <= 3`` factor as ``(y - 1)^3`` times a quadratic or lower
    without positive roots. Larger integers use the classical Budan-Fourier count
    on (0, inf). Non-integer ``sigma > 1`` use the generalized sign table and
    ``0 < sigma < 1`` the bound from the monotone branch structure.
    """
    if sigma <= 0:
        raise DomainError("sigma must be positive")
    n_total, n_at_one = _expected_count(sigma)
    p = p_sigma(sigma)
    if sigma == int(sigma) and sigma <= 3:
        quotient = _deflate_triple_one(p.dense_integer_coefficients())
        bound = 3 + _positive_roots_low_degree(quotient)
        return RootCount(n_total, n_at_one, bound, CountMethod.FACTORIZATION)
    if sigma == int(sigma):
        bound = _classical_bf(p.dense_integer_coefficients())
        return RootCount(n_total, n_at_one, bound, CountMethod.CLASSICAL_BF)
    if sigma > 1:
        bound = _sign_changes(_extended_bf_signs(sigma))  # v(inf) = 0: all tend to +inf
        return RootCount(n_total, n_at_one, bound, CountMethod.EXTENDED_BF)
    return RootCount(n_total, n_at_one, 3, CountMethod.MONOTONICITY)


def multiplicity_at_one(p: FractionalPolynomial, tol_factor: float = 1e-6, max_order: int = 7) -> int:
    """Order of the first derivative at ``y = 1`` exceeding ``tol_factor * max|coefficient|``."""
    tol = tol_factor * max(abs(c) for c in p.coefficients)
    for k in range(max_order + 1):
        if abs(p.derivative_at(1.0, k)) > tol:
            return k
    return max_order + 1


def richardson_derivative_at_one(p: FractionalPolynomial, order: int, h: float = 0.05) -> float:
    """Finite-difference derivative at ``y = 1`` refined by Richardson extrapolation.

    Central differences of step ``h`` and ``h/2`` have leading error ``O(h^2)``.
    """
    from math import comb

    def central(step: float) -> float:
        total = 0.0
        for j in range(order + 1):
            total += (-1) ** j * comb(order, j) * p.eval(1.0 + (order / 2.0 - j) * step)
        return total / step**order

    d1, d2 = central(h), central(h / 2.0)
    return (4.0 * d2 - d1) / 3.0


def count_roots_oracle(
    sigma: float,
    y_min: float = 1e-6,
    y_max: float = 1e6,
    n_grid: int = 200_001,
    check_bound: bool = True,
) -> OracleCount:
    """Brute-force count of positive roots: multiplicity at 1 plus a log-grid sign scan.

    Values whose size is below the rounding bound of the sum are treated as
    unsigned, and the scan is split at ``y = 1`` so that the root there is
    never counted as a crossing.
    """
    p = p_sigma(sigma)
    m = multiplicity_at_one(p)
    roots: list[float] = []
    eps = np.finfo(float).eps
    for lo, hi in ((y_min, 1.0), (1.0, y_max)):
        ys = np.geomspace(lo, hi, n_grid // 2)
        ys = ys[ys != 1.0]
        vals = p.eval_scaled(ys)
        floor = 64 * eps * p.magnitude_scaled(ys)
        signs = np.where(np.abs(vals) <= floor, 0, np.sign(vals)).astype(int)
        idx = np.nonzero(signs)[0]
        for i, j in zip(idx, idx[1:]):
            if signs[i] != signs[j]:
                f = lambda t: float(p.eval_scaled(np.array([t]))[0])  # noqa: E731
                roots.append(brentq(f, float(ys[i]), float(ys[j]), xtol=1e-15, rtol=4 * eps))
    roots.sort()
    result = OracleCount(m + len(roots), m, tuple(roots))
    if check_bound:
        bound = budan_fourier_bound(sigma).bf_bound
        if result.n_total > bound:
            raise OracleMismatchError(f"oracle found {result.n_total} roots above the bound {bound}")
    return result


def roots_json(sigma: float) -> str:
    rc = budan_fourier_bound(sigma)
    oc = count_roots_oracle(sigma)
    doc = {
        "sigma": float(sigma),
        "bf_bound": rc.bf_bound,
        "method": rc.method.value,
        "n_total": oc.n_total,
        "n_at_one": oc.n_at_one,
        "simple_roots": [float(r) for r in oc.simple_roots],
    }
    return dumps_json(doc)
