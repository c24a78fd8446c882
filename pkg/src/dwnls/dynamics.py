"""Time evolution of the two-mode Hamiltonian system.

The planar flow is ``theta' = dH/dz``, ``z' = -dH/dtheta`` with

    H = -sqrt(1 - z^2) cos(theta) + eta/(sigma+1) [((1+z)/2)^(sigma+1) + ((1-z)/2)^(sigma+1)].

Near the poles ``|z| -> 1`` the angle is ill-defined, so integration switches to
the mode amplitudes ``(a_R, a_L)`` with ``i a_R' = -a_L + eta |a_R|^(2 sigma) a_R``
(and the mirror equation). Those equations run the same orbits at twice the speed
and in the opposite direction, so a planar step ``dt`` is an amplitude step ``-dt/2``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._numerics import fmt
from .errors import DomainError
from .two_level import BranchPoint

POLE_SWITCH = 0.999


@dataclass(frozen=True)
class TwoLevelState:
    theta: float
    z: float


@dataclass
class Trajectory:
    times: np.ndarray
    states: list[TwoLevelState]
    hamiltonian_values: np.ndarray

    @property
    def theta(self) -> np.ndarray:
        return np.array([s.theta for s in self.states])

    @property
    def z(self) -> np.ndarray:
        return np.array([s.z for s in self.states])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["tau", "theta", "z", "H"])
        for t, s, h in zip(self.times, self.states, self.hamiltonian_values):
            w.writerow([fmt(t), fmt(s.theta), fmt(s.z), fmt(h)])
        return buf.getvalue()


class ProbeVerdict(Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    INCONCLUSIVE = "inconclusive"


def hamiltonian(theta: float, z: float, eta: float, sigma: float) -> float:
    if abs(z) > 1.0:
        raise DomainError(f"|z| must not exceed 1, got {z}")
    return -math.sqrt(1.0 - z * z) * math.cos(theta) + eta / (sigma + 1.0) * (
        ((1.0 + z) / 2.0) ** (sigma + 1.0) + ((1.0 - z) / 2.0) ** (sigma + 1.0)
    )


def _vector_field(theta: float, z: float, eta: float, sigma: float) -> tuple[float, float]:
    if abs(z) > 1.0:
        raise DomainError(f"trajectory left the sphere: z = {z}")
    root = math.sqrt(1.0 - z * z)
    dH_dz = z * math.cos(theta) / root + 0.5 * eta * (((1.0 + z) / 2.0) ** sigma - ((1.0 - z) / 2.0) ** sigma)
    dH_dtheta = root * math.sin(theta)
    return dH_dz, -dH_dtheta


def hessian(theta: float, z: float, eta: float, sigma: float) -> np.ndarray:
    """Analytic Hessian of H in the variables ``(theta, z)``."""
    root = math.sqrt(1.0 - z * z)
    h_tt = root * math.cos(theta)
    h_tz = -z * math.sin(theta) / root
    h_zz = math.cos(theta) / root**3 + eta * sigma / 4.0 * (
        ((1.0 + z) / 2.0) ** (sigma - 1.0) + ((1.0 - z) / 2.0) ** (sigma - 1.0)
    )
    return np.array([[h_tt, h_tz], [h_tz, h_zz]])


def step(state: TwoLevelState, dt: float, eta: float, sigma: float) -> TwoLevelState:
    """One classical fourth-order Runge-Kutta step of the planar flow."""
    th, z = state.theta, state.z
    k1 = _vector_field(th, z, eta, sigma)
    k2 = _vector_field(th + 0.5 * dt * k1[0], z + 0.5 * dt * k1[1], eta, sigma)
    k3 = _vector_field(th + 0.5 * dt * k2[0], z + 0.5 * dt * k2[1], eta, sigma)
    k4 = _vector_field(th + dt * k3[0], z + dt * k3[1], eta, sigma)
    th_new = th + dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    z_new = z + dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    if abs(z_new) > 1.0:
        raise DomainError(f"step left the sphere: z = {z_new}")
    return TwoLevelState(th_new, z_new)


def to_amplitudes(state: TwoLevelState) -> np.ndarray:
    return np.array(
        [math.sqrt((1.0 + state.z) / 2.0) * complex(math.cos(state.theta), math.sin(state.theta)),
         math.sqrt((1.0 - state.z) / 2.0)],
        dtype=complex,
    )


def from_amplitudes(a: np.ndarray, theta_ref: float) -> TwoLevelState:
    """Back to ``(theta, z)``; the angle is unwrapped to lie nearest ``theta_ref``."""
    nr, nl = abs(a[0]) ** 2, abs(a[1]) ** 2
    z = (nr - nl) / (nr + nl)
    theta = math.atan2((a[0] * np.conj(a[1])).imag, (a[0] * np.conj(a[1])).real)
    theta += 2.0 * math.pi * round((theta_ref - theta) / (2.0 * math.pi))
    return TwoLevelState(theta, max(-1.0, min(1.0, z)))


def _amplitude_field(a: np.ndarray, eta: float, sigma: float) -> np.ndarray:
    ar, al = a
    return -1j * np.array([-al + eta * abs(ar) ** (2 * sigma) * ar, -ar + eta * abs(al) ** (2 * sigma) * al])


def amplitude_step(a: np.ndarray, dt: float, eta: float, sigma: float) -> np.ndarray:
    """RK4 step of the amplitude equations, followed by renormalization to unit norm."""
    k1 = _amplitude_field(a, eta, sigma)
    k2 = _amplitude_field(a + 0.5 * dt * k1, eta, sigma)
    k3 = _amplitude_field(a + 0.5 * dt * k2, eta, sigma)
    k4 = _amplitude_field(a + dt * k3, eta, sigma)
    out = a + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return out / np.linalg.norm(out)


def _advance(state: TwoLevelState, dt: float, eta: float, sigma: float) -> TwoLevelState:
    if abs(state.z) > POLE_SWITCH:
        a = amplitude_step(to_amplitudes(state), -0.5 * dt, eta, sigma)
        return from_amplitudes(a, state.theta)
    return step(state, dt, eta, sigma)


def integrate(
    state: TwoLevelState,
    eta: float,
    sigma: float,
    dt: float,
    horizon: float,
    record_every: int = 1,
) -> Trajectory:
    """Integrate from ``state`` for ``horizon`` time units (negative ``dt`` runs backward)."""
    n = int(round(horizon / abs(dt)))
    times, states, energies = [0.0], [state], [hamiltonian(state.theta, state.z, eta, sigma)]
    s = state
    for i in range(1, n + 1):
        s = _advance(s, dt, eta, sigma)
        if i % record_every == 0 or i == n:
            times.append(i * dt)
            states.append(s)
            energies.append(hamiltonian(s.theta, s.z, eta, sigma))
    return Trajectory(np.array(times), states, np.array(energies))


def oscillation_frequency(traj: Trajectory, centre: float = 0.0) -> float:
    """Angular frequency from the mean spacing of upward crossings of ``z = centre``."""
    z = traj.z - centre
    t = traj.times
    ups = []
    for i in range(len(z) - 1):
        if z[i] < 0 <= z[i + 1]:
            ups.append(t[i] - z[i] * (t[i + 1] - t[i]) / (z[i + 1] - z[i]))
    if len(ups) < 2:
        raise DomainError("fewer than two crossings; lengthen the horizon")
    period = (ups[-1] - ups[0]) / (len(ups) - 1)
    return 2.0 * math.pi / period


def _deviation(s: TwoLevelState, ref: TwoLevelState) -> float:
    dth = (s.theta - ref.theta + math.pi) % (2.0 * math.pi) - math.pi
    return math.hypot(dth, s.z - ref.z)


def probe_stability(
    point: BranchPoint,
    sigma: float,
    delta: float = 1e-6,
    horizon: float = 60.0,
    dt: float = 1e-2,
) -> tuple[float, ProbeVerdict]:
    """Perturb a fixed point and watch the deviation.

    At a saddle the kick points along the unstable eigenvector and the growth rate
    comes from a log-linear fit of the deviation; otherwise the kick goes along
    whichever coordinate keeps the linear orbit from stretching beyond ``delta``.
    The verdict is unstable once the deviation exceeds ``100 delta``, stable if it
    stays within ``10 delta`` up to the horizon, and inconclusive in between.
    """
    ref = TwoLevelState(point.theta.angle, point.z)
    hs = hessian(ref.theta, ref.z, point.eta, sigma)
    jac = np.array([[hs[1, 0], hs[1, 1]], [-hs[0, 0], -hs[0, 1]]])
    det = float(np.linalg.det(hs))
    if det < 0:
        lam = math.sqrt(-det)
        v = np.array([jac[0, 1], lam - jac[0, 0]])
        v = v / np.linalg.norm(v) * delta
    elif abs(hs[1, 1]) <= abs(hs[0, 0]):
        v = np.array([0.0, delta])
    else:
        v = np.array([delta, 0.0])
    s = TwoLevelState(ref.theta + v[0], ref.z + v[1])
    n = int(round(horizon / dt))
    ts, logs = [0.0], [math.log(delta)]
    max_dev = delta
    for i in range(1, n + 1):
        s = _advance(s, dt, point.eta, sigma)
        dev = _deviation(s, ref)
        max_dev = max(max_dev, dev)
        ts.append(i * dt)
        logs.append(math.log(max(dev, 1e-300)))
        if dev > 100.0 * delta:
            rate = float(np.polyfit(ts, logs, 1)[0])
            return rate, ProbeVerdict.UNSTABLE
    rate = float(np.polyfit(ts, logs, 1)[0])
    if max_dev <= 10.0 * delta:
        return rate, ProbeVerdict.STABLE
    return rate, ProbeVerdict.INCONCLUSIVE
