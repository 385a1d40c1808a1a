"""Diagnostics on the evolving phase-space state.

All reductions act on the x-p corner, where the stored matrix Q is
Hermitian at every grid point.  The scalar density w0 = tr(Q)/4 is a real
quasi-probability whose marginals reproduce the coordinate and momentum
densities; expectation values of a matrix symbol O(x, p) are
sum tr(Q O)/4 dx dp, normalized by the current norm.  Summations use
numpy's pairwise reduction, so results are identical run to run.
"""
from __future__ import annotations

from dataclasses import dataclass, field as _dfield

import numpy as np

from .phase_grid import MatrixPhaseField, Representation

_GAMMA0_DIAG = np.array([1.0, 1.0, -1.0, -1.0])


def _require_xp(f: MatrixPhaseField) -> None:
    if f.rep is not Representation.X_P:
        raise ValueError(f"observable needs the X_P representation, got {f.rep}")


def w0(f: MatrixPhaseField) -> np.ndarray:
    """Scalar phase-space density tr(Q)/4 over (x, p); real part."""
    _require_xp(f)
    return np.einsum("xpii->xp", f.data).real / 4.0


def w0_imag_residual(f: MatrixPhaseField) -> float:
    """Largest imaginary part left in tr(Q)/4 (Hermiticity diagnostic)."""
    _require_xp(f)
    return float(np.abs(np.einsum("xpii->xp", f.data).imag).max()) / 4.0


def norm(f: MatrixPhaseField) -> float:
    """Total phase-space mass of w0; conserved by the propagation."""
    g = f.grid
    return float(w0(f).sum() * g.dx * g.dp)


def marginal_x(f: MatrixPhaseField) -> np.ndarray:
    return w0(f).sum(axis=1) * f.grid.dp


def marginal_p(f: MatrixPhaseField) -> np.ndarray:
    return w0(f).sum(axis=0) * f.grid.dx


def x_mean(f: MatrixPhaseField) -> float:
    g = f.grid
    w = w0(f)
    return float((g.x @ w.sum(axis=1)) / w.sum())


def momentum_moments(f: MatrixPhaseField) -> tuple[float, float]:
    """(mean p, mean p^2) of the scalar density."""
    g = f.grid
    wp = w0(f).sum(axis=0)
    total = wp.sum()
    p1 = float((g.p @ wp) / total)
    p2 = float(((g.p**2) @ wp) / total)
    return p1, p2


def negativity(f: MatrixPhaseField) -> float:
    """Integral of w0 over its strictly negative region (a value <= 0)."""
    g = f.grid
    w = w0(f)
    return float(w[w < 0].sum() * g.dx * g.dp)


def most_negative(f: MatrixPhaseField) -> float:
    return float(w0(f).min())


def transmission(f: MatrixPhaseField, x_threshold: float) -> float:
    """Fraction of the scalar density beyond x_threshold."""
    g = f.grid
    if not (g.x_min <= x_threshold <= g.x_max):
        raise ValueError(f"threshold {x_threshold} outside x range [{g.x_min}, {g.x_max}]")
    w = w0(f)
    beyond = w[g.x > x_threshold, :].sum()
    return float(beyond / w.sum())


def free_hamiltonian(p: np.ndarray, m: float) -> np.ndarray:
    """Free Dirac symbol alpha^1 p + m gamma^0 per momentum point, (n, 4, 4)."""
    p = np.asarray(p, dtype=float)
    out = np.zeros(p.shape + (4, 4), dtype=np.complex128)
    out[..., 0, 3] = p
    out[..., 1, 2] = p
    out[..., 2, 1] = p
    out[..., 3, 0] = p
    for i in range(4):
        out[..., i, i] = m * _GAMMA0_DIAG[i]
    return out


def energy_projectors(p: np.ndarray, m: float) -> tuple[np.ndarray, np.ndarray]:
    """Free energy-sign projectors (E +/- H(p)) / (2E) per momentum point."""
    p = np.asarray(p, dtype=float)
    h = free_hamiltonian(p, m)
    e = np.sqrt(p * p + m * m)[..., None, None]
    eye = np.eye(4)
    plus = 0.5 * (eye + h / e)
    minus = 0.5 * (eye - h / e)
    return plus, minus


def antiparticle_fraction(f: MatrixPhaseField, m: float) -> float:
    """Weight of the negative-energy (free-projector) content, in [0, 1]."""
    _require_xp(f)
    g = f.grid
    _, minus = energy_projectors(g.p, m)
    val = np.einsum("pab,xpba->", minus, f.data, optimize=True).real / 4.0 * g.dx * g.dp
    return float(val / norm(f))


def energy_free(f: MatrixPhaseField, m: float) -> float:
    """Expectation of the free Dirac Hamiltonian alpha^1 p + m gamma^0."""
    _require_xp(f)
    g = f.grid
    h = free_hamiltonian(g.p, m)
    val = np.einsum("pab,xpba->", h, f.data, optimize=True).real / 4.0 * g.dx * g.dp
    return float(val / norm(f))


def purity(f: MatrixPhaseField) -> float:
    """Pure states give 1: (2 pi / 16) sum tr(Q Q) dx dp."""
    _require_xp(f)
    g = f.grid
    val = np.einsum("xpab,xpba->", f.data, f.data, optimize=True).real
    return float(2.0 * np.pi / 16.0 * val * g.dx * g.dp)


def hermiticity_defect(f: MatrixPhaseField) -> float:
    """Max pointwise |Q - Q^dag| in the x-p corner."""
    _require_xp(f)
    return float(np.abs(f.data - np.conj(np.swapaxes(f.data, -1, -2))).max())


def support_margin(f: MatrixPhaseField, rel_threshold: float = 1e-5) -> tuple[int, int]:
    """Distance (grid cells) of the state's support from the x and p edges.

    Support = cells where the marginal exceeds rel_threshold of its peak.
    """
    mx = marginal_x(f)
    mp = marginal_p(f)

    def margin(arr):
        mask = arr > rel_threshold * arr.max()
        idx = np.nonzero(mask)[0]
        if idx.size == 0:
            return 0
        return int(min(idx[0], arr.size - 1 - idx[-1]))

    return margin(mx), margin(mp)


SERIES_COLUMNS = (
    "t", "norm", "negativity", "transmission", "antiparticle_fraction",
    "energy", "p_mean", "p2_mean", "x_mean",
)


@dataclass
class ObservableSeries:
    """Time-stamped diagnostic records with a fixed column set."""

    times: list = _dfield(default_factory=list)
    records: list = _dfield(default_factory=list)

    def add(self, t: float, record: dict) -> None:
        if self.times and t <= self.times[-1]:
            raise ValueError("times must be strictly increasing")
        missing = [c for c in SERIES_COLUMNS[1:] if c not in record]
        if missing:
            raise ValueError(f"incomplete record, missing {missing}")
        self.times.append(t)
        self.records.append(dict(record))

    def column(self, name: str) -> np.ndarray:
        if name == "t":
            return np.asarray(self.times)
        return np.asarray([r[name] for r in self.records])

    def rows(self):
        for t, r in zip(self.times, self.records):
            yield (t, *[r[c] for c in SERIES_COLUMNS[1:]])


def measure(f: MatrixPhaseField, m: float, x_threshold: float) -> dict:
    """The full per-time record used by the scenario runner."""
    p1, p2 = momentum_moments(f)
    return {
        "norm": norm(f),
        "negativity": negativity(f),
        "transmission": transmission(f, x_threshold),
        "antiparticle_fraction": antiparticle_fraction(f, m),
        "energy": energy_free(f, m),
        "p_mean": p1,
        "p2_mean": p2,
        "x_mean": x_mean(f),
    }
