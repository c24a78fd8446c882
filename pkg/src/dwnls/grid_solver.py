"""Finite-difference solver for the one-dimensional double-well NLS.

Operator ``H0 = -hbar^2 d^2/dx^2 + V`` on a symmetric grid with Dirichlet ends.
Grid functions are normalized in the discrete L2 norm ``sum |u|^2 dx``.
Stationary states solve ``lambda psi = H0 psi + eps g |psi|^(2 sigma) psi``
with ``||psi|| = 1``; the coupling ``eps`` is tied to the two-mode parameter
through ``eta = eps c_R / omega``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
import scipy.sparse as sps
from scipy.integrate import simpson
from scipy.linalg import eigh_tridiagonal, solve_banded
from scipy.optimize import minimize_scalar
from scipy.sparse.linalg import splu

from .errors import ConvergenceError, DomainError
from .two_level import energy as two_level_energy
from .two_level import Phase


@dataclass(frozen=True)
class GaussianDoubleWell:
    """``V(x) = -depth [exp(-(x - centre)^2 / width) + exp(-(x + centre)^2 / width)]``."""

    depth: float = 1.0
    centre: float = 1.2
    width: float = 1.0

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return -self.depth * (np.exp(-((x - self.centre) ** 2) / self.width) + np.exp(-((x + self.centre) ** 2) / self.width))


@dataclass(frozen=True)
class DoubleDelta:
    """Point interactions of strength ``beta`` at ``x = -a, a`` (negative ``beta`` attracts)."""

    a: float = 1.0
    beta: float = -1.0


@dataclass(frozen=True)
class DiscreteProblem:
    half_width: float = 4.0
    n_points: int = 2001
    hbar: float = 0.1
    sigma: float = 1.0
    potential: GaussianDoubleWell | DoubleDelta = field(default_factory=GaussianDoubleWell)
    g_profile: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if self.n_points < 5:
            raise DomainError("need at least five grid points")
        if self.hbar <= 0 or self.sigma <= 0 or self.half_width <= 0:
            raise DomainError("hbar, sigma and half_width must be positive")

    @property
    def x(self) -> np.ndarray:
        x = np.linspace(-self.half_width, self.half_width, self.n_points)
        return 0.5 * (x - x[::-1])  # exact mirror symmetry

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / (self.n_points - 1)

    def potential_values(self) -> np.ndarray:
        x = self.x
        if isinstance(self.potential, DoubleDelta):
            v = np.zeros_like(x)
            for centre in (-self.potential.a, self.potential.a):
                v[int(np.argmin(np.abs(x - centre)))] += self.potential.beta / self.dx
            return v
        return self.potential(x)

    def g(self) -> np.ndarray:
        return np.ones(self.n_points) if self.g_profile is None else np.asarray(self.g_profile(self.x), dtype=float)

    def tridiagonal(self) -> tuple[np.ndarray, np.ndarray]:
        """Diagonal and off-diagonal of H0."""
        c = self.hbar**2 / self.dx**2
        return 2.0 * c + self.potential_values(), -c * np.ones(self.n_points - 1)

    def apply_h0(self, u: np.ndarray) -> np.ndarray:
        d, e = self.tridiagonal()
        out = d * u
        out[:-1] += e * u[1:]
        out[1:] += e * u[:-1]
        return out

    def inner(self, u: np.ndarray, v: np.ndarray) -> float:
        return float(np.sum(np.conj(u) * v).real * self.dx)

    def norm(self, u: np.ndarray) -> float:
        return math.sqrt(float(np.sum(np.abs(u) ** 2) * self.dx))

    def h2_norm(self, u: np.ndarray) -> float:
        """``sqrt(||u||^2 + ||D2 u||^2)`` with the plain second-difference operator."""
        padded = np.concatenate(([0.0], u, [0.0]))
        lap = (padded[2:] - 2.0 * padded[1:-1] + padded[:-2]) / self.dx**2
        return math.sqrt(float(np.sum(np.abs(u) ** 2 + np.abs(lap) ** 2) * self.dx))


@dataclass
class Doublet:
    lambda_plus: float
    lambda_minus: float
    phi_plus: np.ndarray
    phi_minus: np.ndarray
    third_eigenvalue: float

    @property
    def omega(self) -> float:
        return 0.5 * (self.lambda_minus - self.lambda_plus)

    @property
    def Omega(self) -> float:
        return 0.5 * (self.lambda_plus + self.lambda_minus)

    @property
    def phi_right(self) -> np.ndarray:
        return (self.phi_plus + self.phi_minus) / math.sqrt(2.0)

    @property
    def phi_left(self) -> np.ndarray:
        return (self.phi_plus - self.phi_minus) / math.sqrt(2.0)

    @property
    def gap(self) -> float:
        """Distance from the doublet to the rest of the spectrum."""
        return self.third_eigenvalue - self.lambda_minus


def _sector_eigenpairs(problem: DiscreteProblem, parity: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Lowest ``k`` eigenpairs of H0 restricted to even (``+1``) or odd (``-1``) grid functions.

    Works on the right half of the grid. For even functions the centre row couples
    twice to its neighbour; the diagonal rescaling of the centre unknown by
    ``sqrt(2)`` makes that block symmetric again.
    """
    d, e = problem.tridiagonal()
    m = problem.n_points // 2
    if parity > 0:
        dd, ee = d[m:].copy(), e[m:].copy()
        ee[0] *= math.sqrt(2.0)
        w, v = eigh_tridiagonal(dd, ee, select="i", select_range=(0, k - 1))
        v[0] *= math.sqrt(2.0)
        full = np.concatenate((v[:0:-1], v))
    else:
        w, v = eigh_tridiagonal(d[m + 1 :], e[m + 1 :], select="i", select_range=(0, k - 1))
        full = np.concatenate((-v[::-1], np.zeros((1, k)), v))
    full = full / np.sqrt(np.sum(full**2, axis=0) * problem.dx)
    return w, full


def _is_mirror_symmetric(problem: DiscreteProblem) -> bool:
    v = problem.potential_values()
    return problem.n_points % 2 == 1 and bool(np.allclose(v, v[::-1], rtol=0, atol=1e-14 * (1 + np.abs(v).max())))


def linear_doublet(problem: DiscreteProblem) -> Doublet:
    """Two lowest eigenpairs of H0 with the sign conventions used throughout.

    ``phi_plus`` has positive mean and ``phi_minus`` is positive on ``x > 0``.
    For mirror-symmetric potentials the two parity sectors are diagonalized
    separately, so the pair stays resolved even when the splitting is close to
    the rounding level of the full matrix.
    """
    x = problem.x
    if _is_mirror_symmetric(problem):
        we, ve = _sector_eigenpairs(problem, +1, 2)
        wo, vo = _sector_eigenpairs(problem, -1, 2)
        lam_p, lam_m, p, m = float(we[0]), float(wo[0]), ve[:, 0], vo[:, 0]
        third = float(min(we[1], wo[1]))
    else:
        d, e = problem.tridiagonal()
        w, v = eigh_tridiagonal(d, e, select="i", select_range=(0, 2))
        v = v / math.sqrt(problem.dx)
        lam_p, lam_m, p, m, third = float(w[0]), float(w[1]), v[:, 0], v[:, 1], float(w[2])
    # both potentials vanish at infinity, so bound states sit below zero
    if lam_m >= 0.0:
        raise DomainError(f"doublet missing: second eigenvalue {lam_m:.6g} is not below the continuum edge 0")
    if p.sum() < 0:
        p = -p
    if m[x > 0].sum() < 0:
        m = -m
    return Doublet(lam_p, lam_m, p, m, third)


# relative mismatch allowed between the right- and left-well couplings
COUPLING_RTOL = 1e-10


def coupling_constants(problem: DiscreteProblem, doublet: Doublet) -> tuple[float, float]:
    """``(c_R, c_L)`` with ``c = <phi^(sigma+1), g phi^(sigma+1)>`` for each single-well state."""
    g = problem.g()
    p = 2.0 * problem.sigma + 2.0
    c_r = float(np.sum(g * np.abs(doublet.phi_right) ** p) * problem.dx)
    c_l = float(np.sum(g * np.abs(doublet.phi_left) ** p) * problem.dx)
    return c_r, c_l


def coupling_constant(problem: DiscreteProblem, doublet: Doublet) -> float:
    """``c_R``, after checking it is positive and equal to ``c_L``.

    A nonpositive value means ``g`` is unsuitable. For a symmetric ``g`` the
    mirror relation ``phi_L = S phi_R`` forces the two couplings to agree.
    """
    c_r, c_l = coupling_constants(problem, doublet)
    if c_r <= 0.0:
        raise DomainError(f"nonpositive coupling c_R = {c_r:.6g}; check the g profile")
    if abs(c_r - c_l) > COUPLING_RTOL * abs(c_r):
        raise DomainError(f"c_R = {c_r!r} and c_L = {c_l!r} differ; is g symmetric?")
    return c_r


def epsilon_for_eta(eta: float, problem: DiscreteProblem, doublet: Doublet) -> float:
    return eta * doublet.omega / coupling_constant(problem, doublet)


def widen_until_decayed(problem: DiscreteProblem, threshold: float = 1e-12, max_doublings: int = 6) -> DiscreteProblem:
    """Double the box (keeping the spacing) until the ground state is below ``threshold`` at the ends."""
    for _ in range(max_doublings + 1):
        phi = linear_doublet(problem).phi_plus
        edge = max(abs(phi[0]), abs(phi[-1])) / np.abs(phi).max()
        if edge < threshold:
            return problem
        problem = replace(problem, half_width=2.0 * problem.half_width, n_points=2 * problem.n_points - 1)
    raise ConvergenceError(f"ground state still {edge:.3e} at the boundary after widening")


def well_minima(potential: GaussianDoubleWell) -> tuple[float, float]:
    """Positive location of the right minimum and the minimum value."""
    reach = potential.centre + 3.0 * math.sqrt(potential.width)
    res = minimize_scalar(lambda t: float(potential(np.array([t]))[0]), bounds=(0.0, reach), method="bounded",
                          options={"xatol": 1e-13})
    return float(res.x), float(res.fun)


def agmon_distance(problem: DiscreteProblem, rtol: float = 1e-8) -> float:
    """``int sqrt((V - V_min)_+)`` between the two minima by composite Simpson with step halving."""
    if not isinstance(problem.potential, GaussianDoubleWell):
        raise DomainError("the Agmon distance is defined here for smooth wells only")
    xm, vmin = well_minima(problem.potential)

    def integrand(t: np.ndarray) -> np.ndarray:
        return np.sqrt(np.maximum(problem.potential(t) - vmin, 0.0))

    n = 64
    prev = None
    while n <= 2**22:
        t = np.linspace(-xm, xm, n + 1)
        val = float(simpson(integrand(t), x=t))
        if prev is not None and abs(val - prev) <= rtol * abs(val):
            return val
        prev, n = val, 2 * n
    raise ConvergenceError("Simpson refinement did not settle")


def _project_out(u: np.ndarray, doublet: Doublet, dx: float) -> np.ndarray:
    for phi in (doublet.phi_plus, doublet.phi_minus):
        u = u - phi * np.sum(phi * u) * dx
    return u


def _banded(diag: np.ndarray, off: np.ndarray) -> np.ndarray:
    ab = np.zeros((3, diag.size), dtype=np.result_type(diag, off))
    ab[0, 1:] = off
    ab[1] = diag
    ab[2, :-1] = off
    return ab


def psi_c_fixed_point(
    problem: DiscreteProblem,
    doublet: Doublet,
    a_right: complex,
    a_left: complex,
    E: float,
    epsilon: float,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> tuple[np.ndarray, int]:
    """Iterate ``u -> -eps [H0 - Omega - omega E]^-1 P_c g |phi + u|^(2 sigma) (phi + u)`` from zero.

    ``phi = a_right phi_R + a_left phi_L`` and ``P_c`` removes the doublet. The
    banded solve may pick up a little of the doublet through rounding, so the
    result is projected again. Returns the fixed point and the iteration count.
    """
    if abs(a_right) ** 2 + abs(a_left) ** 2 > 1.0 + 1e-12:
        raise DomainError("|a_R|^2 + |a_L|^2 must not exceed 1")
    dx = problem.dx
    phi = a_right * doublet.phi_right + a_left * doublet.phi_left
    d, e = problem.tridiagonal()
    shift = doublet.Omega + doublet.omega * E
    ab = _banded(d - shift, e)
    g = problem.g()
    s = problem.sigma
    u = np.zeros(problem.n_points, dtype=np.result_type(phi, float))
    prev_step = None
    for it in range(1, max_iter + 1):
        psi = phi + u
        rhs = _project_out(g * np.abs(psi) ** (2 * s) * psi, doublet, dx)
        new = -epsilon * _project_out(solve_banded((1, 1), ab, rhs), doublet, dx)
        step = problem.h2_norm(new - u)
        u = new
        if step < tol:
            return u, it
        if prev_step is not None and prev_step > 0 and step / prev_step > 0.9:
            raise ConvergenceError(f"contraction ratio {step / prev_step:.3f} exceeds 0.9")
        prev_step = step
    raise ConvergenceError("fixed-point iteration did not converge")


@dataclass
class StationarySolution:
    psi: np.ndarray
    lam: float
    eta: float
    epsilon: float
    residual: float
    iterations: int
    a_right: float
    a_left: float
    omega: float
    Omega: float
    psi_c_norm: float

    @property
    def z(self) -> float:
        """Population imbalance of the doublet component."""
        r, l_ = self.a_right**2, self.a_left**2
        return (r - l_) / (r + l_)

    @property
    def E(self) -> float:
        return (self.lam - self.Omega) / self.omega

    def norm_parameter_for(self, sigma: float) -> float:
        """``|eps|^(1/sigma)``, the squared norm of the unscaled solution."""
        return abs(self.epsilon) ** (1.0 / sigma)


def _residual(problem, psi, lam, eps, g):
    s = problem.sigma
    f1 = problem.apply_h0(psi) + eps * g * np.abs(psi) ** (2 * s) * psi - lam * psi
    f2 = 0.5 * (np.sum(psi * psi) * problem.dx - 1.0)
    return f1, f2


def _residual_norm(problem, f1, f2) -> float:
    return math.sqrt(float(np.sum(f1 * f1) * problem.dx)) + abs(f2)


# imbalance change beyond which a solve is reported as having left its branch
BRANCH_JUMP = 0.1
# factor by which one Newton step may raise the residual before damping kicks in
GROWTH_ALLOWANCE = 1e3


def solve_stationary(
    problem: DiscreteProblem,
    doublet: Doublet,
    eta: float,
    z0: float,
    theta0: Phase = Phase.ZERO,
    psi0: np.ndarray | None = None,
    tol: float = 1e-10,
    max_iter: int = 100,
) -> StationarySolution:
    """Damped Newton solve for a normalized stationary state, with ``lambda`` as an unknown.

    The initial guess is the doublet combination with imbalance ``z0`` and
    relative phase ``theta0`` (or ``psi0`` when given); ``lambda`` starts at the
    two-mode value ``Omega + omega E``. A ``RuntimeWarning`` flags a solution
    whose imbalance lands more than ``BRANCH_JUMP`` away from ``z0``.
    """
    dx = problem.dx
    eps = epsilon_for_eta(eta, problem, doublet)
    g = problem.g()
    s = problem.sigma
    phi_r, phi_l = doublet.phi_right, doublet.phi_left
    if psi0 is None:
        sign = 1.0 if theta0 is Phase.ZERO else -1.0
        psi = math.sqrt((1 + z0) / 2) * phi_r + sign * math.sqrt((1 - z0) / 2) * phi_l
        lam = doublet.Omega + doublet.omega * two_level_energy(z0, eta, s, theta0)
    else:
        psi = psi0 / problem.norm(psi0)
        lam = problem.inner(psi, problem.apply_h0(psi)) + eps * float(np.sum(g * np.abs(psi) ** (2 * s + 2)) * dx)
    d0, e0 = problem.tridiagonal()
    n = problem.n_points
    f1, f2 = _residual(problem, psi, lam, eps, g)
    res = _residual_norm(problem, f1, f2)
    for it in range(1, max_iter + 1):
        if res < tol:
            return _checked(_package(problem, doublet, psi, lam, eta, eps, res, it - 1), z0)
        diag = d0 + (2 * s + 1) * eps * g * np.abs(psi) ** (2 * s) - lam
        jac = sps.bmat(
            [
                [sps.diags([e0, diag, e0], [-1, 0, 1], format="csc"), sps.csc_matrix(-psi.reshape(-1, 1))],
                [sps.csc_matrix(psi.reshape(1, -1) * dx), None],
            ],
            format="csc",
        )
        delta = splu(jac).solve(-np.concatenate((f1, [f2])))
        dpsi, dlam = delta[:n], delta[n]
        t = 1.0
        while True:
            cand_psi, cand_lam = psi + t * dpsi, lam + t * dlam
            cf1, cf2 = _residual(problem, cand_psi, cand_lam, eps, g)
            cres = _residual_norm(problem, cf1, cf2)
            # the merit function mixes O(omega) and O(1) directions, so a full
            # Newton step may raise it temporarily; only reject clear blow-ups
            if (np.isfinite(cres) and cres < max(res, 1e-6) * GROWTH_ALLOWANCE) or t < 1e-4:
                break
            t *= 0.5
        psi, lam, f1, f2, res = cand_psi, cand_lam, cf1, cf2, cres
    if res < tol:
        return _checked(_package(problem, doublet, psi, lam, eta, eps, res, max_iter), z0)
    raise ConvergenceError(f"Newton stalled at residual {res:.3e}")


def _checked(sol: StationarySolution, z0: float) -> StationarySolution:
    if abs(sol.z - z0) > BRANCH_JUMP:
        warnings.warn(f"branch jump: started at z = {z0:.4g}, converged to z = {sol.z:.4g}", RuntimeWarning, stacklevel=3)
    return sol


def _package(problem, doublet, psi, lam, eta, eps, res, iters) -> StationarySolution:
    dx = problem.dx
    ar = float(np.sum(doublet.phi_right * psi) * dx)
    al = float(np.sum(doublet.phi_left * psi) * dx)
    c_norm = problem.norm(_project_out(psi, doublet, dx))
    return StationarySolution(psi, float(lam), eta, eps, res, iters, ar, al, doublet.omega, doublet.Omega, c_norm)


L_MINUS_RTOL = 1e-8


@dataclass
class LinearizedOperators:
    """Tridiagonal ``(diag, off)`` pairs of the real-part and imaginary-part linearizations."""

    l_plus: tuple[np.ndarray, np.ndarray]
    l_minus: tuple[np.ndarray, np.ndarray]

    def lowest(self, which: str, k: int = 3) -> np.ndarray:
        d, e = self.l_plus if which == "plus" else self.l_minus
        return eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, k - 1))


def linearized_operators(problem: DiscreteProblem, sol: StationarySolution) -> LinearizedOperators:
    """``L+ = H0 - lambda + (2 sigma + 1) eps g |psi|^(2 sigma)`` and ``L- = H0 - lambda + eps g |psi|^(2 sigma)``.

    In the variables ``phi = |eps|^(1/(2 sigma)) psi`` with ``eps < 0`` these are
    the usual ``H0 - lambda - (2 sigma + 1) g |phi|^(2 sigma)`` and ``H0 - lambda - g |phi|^(2 sigma)``.
    Since ``L- psi`` is the stationarity residual, an unconverged ``sol`` is rejected.
    """
    d, e = problem.tridiagonal()
    dens = problem.g() * np.abs(sol.psi) ** (2 * problem.sigma)
    lp = d - sol.lam + (2 * problem.sigma + 1) * sol.epsilon * dens
    lm = d - sol.lam + sol.epsilon * dens
    lm_psi = lm * sol.psi
    lm_psi[:-1] += e * sol.psi[1:]
    lm_psi[1:] += e * sol.psi[:-1]
    if problem.norm(lm_psi) > L_MINUS_RTOL * problem.norm(sol.psi):
        raise ConvergenceError(f"L- psi = {problem.norm(lm_psi):.3e}: the solution is not converged")
    return LinearizedOperators((lp, e), (lm, e.copy()))


def negative_count(eigenvalues: np.ndarray, tol: float) -> int:
    return int(np.sum(eigenvalues < -tol))


@dataclass(frozen=True)
class NormSample:
    lam: float
    F: float
    dF_dlambda: float


def norm_slope(problem: DiscreteProblem, branch: list[tuple[float, StationarySolution]]) -> list[NormSample]:
    """``F = |eps|^(1/sigma)`` against ``lambda`` along a branch, with centred slopes.

    End points use one-sided differences. A ``lambda`` sequence that turns back
    means the samples straddle a fold and raises ``DomainError``.
    """
    if len(branch) < 3:
        raise DomainError("need at least three solutions on the branch")
    lam = np.array([sol.lam for _, sol in branch])
    F = np.array([sol.norm_parameter_for(problem.sigma) for _, sol in branch])
    steps = np.diff(lam)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise DomainError("lambda is not monotone along the branch (fold inside the samples)")
    order = np.argsort(lam)
    lam, F = lam[order], F[order]
    slopes = np.gradient(F, lam)
    return [NormSample(float(l_), float(f), float(d)) for l_, f, d in zip(lam, F, slopes)]


def norm_slope_at(
    problem: DiscreteProblem,
    doublet: Doublet,
    eta: float,
    z0: float,
    d_eta: float | None = None,
    theta0: Phase = Phase.ZERO,
) -> float:
    """Slope ``dF/dlambda`` at one coupling, from solves at ``eta - d_eta, eta, eta + d_eta``."""
    d_eta = 1e-3 * abs(eta) if d_eta is None else d_eta
    centre = solve_stationary(problem, doublet, eta, z0, theta0)
    branch = [(eta - d_eta, solve_stationary(problem, doublet, eta - d_eta, z0, theta0, psi0=centre.psi)),
              (eta, centre),
              (eta + d_eta, solve_stationary(problem, doublet, eta + d_eta, z0, theta0, psi0=centre.psi))]
    return norm_slope(problem, branch)[1].dF_dlambda


def detect_symmetry_breaking(
    problem: DiscreteProblem,
    doublet: Doublet,
    etas: np.ndarray,
    z_init: float = 0.3,
    z_tol: float = 1e-3,
    max_iter: int = 400,
) -> tuple[float, float] | None:
    """Bracket of couplings where Newton started slightly off-centre stops returning to ``z = 0``.

    ``etas`` should run from weak to strong attraction; the first coupling whose
    converged imbalance exceeds ``z_tol`` closes the bracket.
    """
    prev = None
    for eta in etas:
        # Newton converges only linearly next to the pitchfork, hence the larger budget;
        # falling back to z = 0 is the expected outcome here, not a branch jump
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            sol = solve_stationary(problem, doublet, float(eta), z_init, max_iter=max_iter)
        if abs(sol.z) > z_tol:
            return (prev, float(eta)) if prev is not None else None
        prev = float(eta)
    return None


def with_hbar(problem: DiscreteProblem, hbar: float) -> DiscreteProblem:
    return replace(problem, hbar=hbar)
