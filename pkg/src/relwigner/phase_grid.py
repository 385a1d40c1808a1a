"""Discretized phase space and the four-corner Fourier chain.

The evolving state is a 4x4 complex matrix per grid point, tagged with one
of four representations that differ by which axis of each conjugate pair is
"active":

    (x, p)    <--F_x2lam-->   (lam, p)
      ^                          ^
   F_theta2p                  F_theta2p
      |                          |
    (x, theta) <--F_x2lam-->  (lam, theta)

Axis 0 of the data array always holds x or its conjugate lam (n_x points),
axis 1 holds p or its conjugate theta (n_p points).  The x and p grids are
independent; lam and theta are fixed by them (spacing 2 pi / (n dx), zero
at index n // 2).

Discrete transform conventions (1D per axis, hbar = 1):

    F_x2lam[f](lam)   = sum_x f(x) exp(-i x lam) dx
    F_lam2x[g](x)     = sum_lam g(lam) exp(+i x lam) dlam / (2 pi)
    F_theta2p[f](p)   = sum_theta f(theta) exp(+i p theta) dtheta / (2 pi)
    F_p2theta[g](th)  = sum_p g(p) exp(-i p theta) dp

Each pair is an exact discrete inverse (machine precision round trips) and
simultaneously the Riemann sum of the continuum integral.  The L2 scale
constants are  sum|F_x2lam f|^2 dlam = 2 pi sum|f|^2 dx  and
sum|F_theta2p f|^2 dp = sum|f|^2 dtheta / (2 pi); tests assert both.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.fft as _fft


def fft_workers() -> int:
    """Worker count for the batched FFTs (env RELWIGNER_WORKERS overrides).

    Results are bitwise-independent of this value: workers only split the
    batch of independent 1D transforms.
    """
    env = os.environ.get("RELWIGNER_WORKERS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


class Representation(Enum):
    X_THETA = ("x", "theta")
    X_P = ("x", "p")
    LAMBDA_P = ("lambda", "p")
    LAMBDA_THETA = ("lambda", "theta")

    @property
    def axis1(self) -> str:
        return self.value[0]

    @property
    def axis2(self) -> str:
        return self.value[1]


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class PhaseGrid:
    """Coupled x/p grids with their Fourier-conjugate lam/theta axes."""

    n_x: int
    n_p: int
    x_min: float
    x_max: float
    p_min: float
    p_max: float

    def __post_init__(self):
        for name, n in (("n_x", self.n_x), ("n_p", self.n_p)):
            if n < 8 or not _is_pow2(n):
                raise ValueError(f"{name} must be a power of two >= 8, got {n}")
        if not (self.x_max > self.x_min and self.p_max > self.p_min):
            raise ValueError("empty x or p range")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_x

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / self.n_p

    @property
    def dlam(self) -> float:
        return 2.0 * np.pi / (self.n_x * self.dx)

    @property
    def dtheta(self) -> float:
        return 2.0 * np.pi / (self.n_p * self.dp)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_x)

    @property
    def p(self) -> np.ndarray:
        return self.p_min + self.dp * np.arange(self.n_p)

    @property
    def lam(self) -> np.ndarray:
        return self.dlam * (np.arange(self.n_x) - self.n_x // 2)

    @property
    def theta(self) -> np.ndarray:
        return self.dtheta * (np.arange(self.n_p) - self.n_p // 2)


def make_grid(n_x: int, n_p: int, x_min: float, x_max: float,
              p_min: float, p_max: float) -> PhaseGrid:
    return PhaseGrid(n_x, n_p, x_min, x_max, p_min, p_max)


@dataclass
class MatrixPhaseField:
    """4x4 complex matrix per phase-space point, tagged by representation.

    data has shape (n_x, n_p, 4, 4), C-contiguous: axis 0 runs over x (or
    lam), axis 1 over p (or theta).  In the X_P representation the matrix
    is Hermitian at every point (up to roundoff), so its trace is real.
    """

    grid: PhaseGrid
    rep: Representation
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        expected = (self.grid.n_x, self.grid.n_p, 4, 4)
        if self.data.shape != expected:
            raise ValueError(f"data shape {self.data.shape}, expected {expected}")
        if self.data.dtype != np.complex128:
            self.data = self.data.astype(np.complex128)

    def copy(self) -> "MatrixPhaseField":
        return MatrixPhaseField(self.grid, self.rep, self.data.copy())


def zeros_field(grid: PhaseGrid, rep: Representation) -> MatrixPhaseField:
    return MatrixPhaseField(grid, rep, np.zeros((grid.n_x, grid.n_p, 4, 4), dtype=np.complex128))


def _require_axis1(f: MatrixPhaseField, name: str) -> None:
    if f.rep.axis1 != name:
        raise ValueError(f"field axis 1 is {f.rep.axis1!r}, transform needs {name!r}")


def _require_axis2(f: MatrixPhaseField, name: str) -> None:
    if f.rep.axis2 != name:
        raise ValueError(f"field axis 2 is {f.rep.axis2!r}, transform needs {name!r}")


_REP_BY_AXES = {(r.axis1, r.axis2): r for r in Representation}


def _swap1(rep: Representation) -> Representation:
    return _REP_BY_AXES[("lambda" if rep.axis1 == "x" else "x", rep.axis2)]


def _swap2(rep: Representation) -> Representation:
    return _REP_BY_AXES[(rep.axis1, "p" if rep.axis2 == "theta" else "theta")]


def _alt(n: int) -> np.ndarray:
    """(-1)^j sign vector: carries the centered-axis phase into FFT ordering."""
    s = np.ones(n)
    s[1::2] = -1.0
    return s


def ft_x_to_lambda(f: MatrixPhaseField) -> MatrixPhaseField:
    """x -> lam along axis 0: sum_x f exp(-i x lam) dx, per matrix component."""
    _require_axis1(f, "x")
    g = f.grid
    sgn = _alt(g.n_x)[:, None, None, None]
    phase = np.exp(-1j * g.x_min * g.lam)[:, None, None, None]
    out = g.dx * phase * _fft.fft(f.data * sgn, axis=0, workers=fft_workers())
    return MatrixPhaseField(g, _swap1(f.rep), out)


def ft_lambda_to_x(f: MatrixPhaseField) -> MatrixPhaseField:
    """lam -> x along axis 0: sum_lam f exp(+i x lam) dlam / (2 pi)."""
    _require_axis1(f, "lambda")
    g = f.grid
    sgn = _alt(g.n_x)[:, None, None, None]
    phase = np.exp(1j * g.x_min * g.lam)[:, None, None, None]
    out = sgn / g.dx * _fft.ifft(f.data * phase, axis=0, workers=fft_workers())
    return MatrixPhaseField(g, _swap1(f.rep), out)


def ft_theta_to_p(f: MatrixPhaseField) -> MatrixPhaseField:
    """theta -> p along axis 1: sum_theta f exp(+i p theta) dtheta / (2 pi)."""
    _require_axis2(f, "theta")
    g = f.grid
    sgn = _alt(g.n_p)[None, :, None, None]
    phase = np.exp(1j * g.p_min * g.theta)[None, :, None, None]
    out = sgn / g.dp * _fft.ifft(f.data * phase, axis=1, workers=fft_workers())
    return MatrixPhaseField(g, _swap2(f.rep), out)


def ft_p_to_theta(f: MatrixPhaseField) -> MatrixPhaseField:
    """p -> theta along axis 1: sum_p f exp(-i p theta) dp."""
    _require_axis2(f, "p")
    g = f.grid
    sgn = _alt(g.n_p)[None, :, None, None]
    phase = np.exp(-1j * g.p_min * g.theta)[None, :, None, None]
    out = g.dp * phase * _fft.fft(f.data * sgn, axis=1, workers=fft_workers())
    return MatrixPhaseField(g, _swap2(f.rep), out)


def to_representation(f: MatrixPhaseField, target: Representation) -> MatrixPhaseField:
    """Walk the Fourier diagram from the current corner to ``target``."""
    out = f
    if out.rep.axis1 != target.axis1:
        out = ft_x_to_lambda(out) if out.rep.axis1 == "x" else ft_lambda_to_x(out)
    if out.rep.axis2 != target.axis2:
        out = ft_theta_to_p(out) if out.rep.axis2 == "theta" else ft_p_to_theta(out)
    return out
