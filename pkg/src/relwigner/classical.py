"""Classical-limit machinery: diagonalizing frame and trajectory integrator.

The commuting-symbol Dirac generator

    D = (p0 - a0) 1 - alpha.(p - a) - m gamma^0

is block-diagonalized by the momentum-dependent unitary frame

    U = sqrt((E+m)/(2E)) (1 + gamma^k pi^k / (E+m)),   E = sqrt(pi^2 + m^2),

into diag(p0 - a0 - E, ., p0 - a0 + E, .): the upper block carries the
particle mass shell (p0 = a0 + E) and the lower block the antiparticle
one.  The corresponding pair of classical Hamiltonians, with t as the
evolution parameter, is E_sign(x, p) = a0(x) + sign * sqrt((p-a)^2 + m^2);
the sign = -1 branch moves against its momentum.  Trajectories use
classic fourth-order Runge-Kutta.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .clifford import gamma
from .propagator import Potential


@dataclass(frozen=True)
class ClassicalPoint:
    x: float
    p: float
    sign: int = +1

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValueError("sign must be +1 or -1")
        if not (np.isfinite(self.x) and np.isfinite(self.p)):
            raise ValueError("non-finite phase-space point")


def foldy_unitary(p_vec, a_vec, a0: float, m: float) -> np.ndarray:
    """Diagonalizing unitary at kinetic momentum pi = p - a.

    The scalar potential a0 shifts both diagonal blocks equally and does
    not enter the frame.  Singular when E + m vanishes (massless at zero
    kinetic momentum).
    """
    pi = np.asarray(p_vec, dtype=float) - np.asarray(a_vec, dtype=float)
    e = float(np.sqrt(pi @ pi + m * m))
    if e + m < 1e-14:
        raise ValueError("singular frame: E + m is zero (massless, zero kinetic momentum)")
    x_slash = sum(pi[k] * np.asarray(gamma(k + 1)) for k in range(3))
    return np.sqrt((e + m) / (2.0 * e)) * (np.eye(4) + x_slash / (e + m))


def classical_hamiltonians(x: float, p: float, potential: Potential, m: float,
                           t: float = 0.0) -> tuple[float, float]:
    """Reduced particle/antiparticle energies (E_plus, E_minus) at (x, p)."""
    xa = np.asarray(float(x))
    a0 = float(potential.scalar(t, xa))
    a1 = float(potential.vector(t, xa)[0])
    root = float(np.hypot(p - a1, m))
    return a0 + root, a0 - root


def diagonalization_check(p_vec, a_vec, a0: float, m: float,
                          p0: float = 0.0) -> tuple[float, float]:
    """(max off-diagonal, max diagonal error) of U D U^dag.

    The expected diagonal is (h, h, g, g) with h = p0 - a0 - E and
    g = p0 - a0 + E at E = sqrt((p-a)^2 + m^2).
    """
    pi = np.asarray(p_vec, dtype=float) - np.asarray(a_vec, dtype=float)
    e = float(np.sqrt(pi @ pi + m * m))
    u = foldy_unitary(p_vec, a_vec, a0, m)
    d = (p0 - a0) * np.eye(4, dtype=complex) - m * np.asarray(gamma(0))
    for k in range(3):
        d -= pi[k] * (np.asarray(gamma(0)) @ np.asarray(gamma(k + 1)))
    r = u @ d @ u.conj().T
    off = float(np.abs(r - np.diag(np.diag(r))).max())
    expected = np.array([p0 - a0 - e] * 2 + [p0 - a0 + e] * 2)
    diag_err = float(np.abs(np.diag(r) - expected).max())
    return off, diag_err


def _d_dx(fn, t: float, x: float, h: float = 1e-5) -> float:
    """Five-point central difference for potential callables."""
    xs = np.asarray([x - 2 * h, x - h, x + h, x + 2 * h])
    v = np.asarray(fn(t, xs), dtype=float)
    return float((v[0] - 8 * v[1] + 8 * v[2] - v[3]) / (12 * h))


@dataclass
class TrajectoryResult:
    times: np.ndarray
    xs: np.ndarray
    ps: np.ndarray
    energies: np.ndarray
    sign: int
    left_domain: bool = False

    @property
    def points(self) -> list[ClassicalPoint]:
        return [ClassicalPoint(float(x), float(p), self.sign)
                for x, p in zip(self.xs, self.ps)]

    @property
    def energy_drift(self) -> float:
        e0 = self.energies[0]
        return float(np.abs(self.energies - e0).max() / max(1e-300, abs(e0)))


def integrate_trajectory(start: ClassicalPoint, potential: Potential, m: float,
                         dt: float, n_steps: int,
                         x_range: Optional[tuple[float, float]] = None) -> TrajectoryResult:
    """RK4 integration of dx/dt = dE/dp, dp/dt = -dE/dx on one energy branch.

    Analytic potential derivatives are used when the Potential carries
    them; otherwise a five-point central difference.  Leaving ``x_range``
    is recorded on the result, not fatal.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    sign = start.sign

    def da0(t, x):
        if potential.a0 is None:
            return 0.0
        if potential.da0 is not None:
            return float(potential.da0(t, np.asarray(x)))
        return _d_dx(potential.a0, t, x)

    def a1(t, x):
        return float(potential.vector(t, np.asarray(float(x)))[0])

    def rhs(t, x, p):
        kin = p - a1(t, x)
        root = np.hypot(kin, m)
        v = sign * kin / root
        # dE/dx = da0/dx - sign * kin * da1/dx / root; scenarios have a1 = 0
        da1 = 0.0
        if potential.a_vec is not None:
            da1 = _d_dx(lambda tt, xx: np.asarray(potential.a_vec(tt, xx))[0], t, x)
        f = -(da0(t, x) - sign * kin * da1 / root)
        return v, f

    def energy(t, x, p):
        xa = np.asarray(float(x))
        return float(potential.scalar(t, xa)) + sign * float(np.hypot(p - a1(t, x), m))

    ts = dt * np.arange(n_steps + 1)
    xs = np.empty(n_steps + 1)
    ps = np.empty(n_steps + 1)
    es = np.empty(n_steps + 1)
    x, p = start.x, start.p
    left = False
    for i in range(n_steps + 1):
        xs[i], ps[i] = x, p
        es[i] = energy(ts[i], x, p)
        if x_range is not None and not (x_range[0] <= x <= x_range[1]):
            left = True
        if i == n_steps:
            break
        t = ts[i]
        k1x, k1p = rhs(t, x, p)
        k2x, k2p = rhs(t + dt / 2, x + dt / 2 * k1x, p + dt / 2 * k1p)
        k3x, k3p = rhs(t + dt / 2, x + dt / 2 * k2x, p + dt / 2 * k2p)
        k4x, k4p = rhs(t + dt, x + dt * k3x, p + dt * k3p)
        x += dt / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        p += dt / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
    return TrajectoryResult(ts, xs, ps, es, sign, left)
