"""Spinor wavepackets and their lift to matrix-valued phase-space states.

Natural units (c = hbar = 1) throughout.  The canonical packet is a unit
Gaussian envelope times a fixed positive-energy spinor direction,

    psi(x) = exp(-(x-x0)^2/(2 w^2) + i x p1) (E+m, 0, 0, p1)^T,
    E = sqrt(p1^2 + m^2),

which becomes an exact energy eigenstate in the wide-packet limit.  A
spinor lifts to the evolving phase-space matrix by forming the
shifted-coordinate outer product  psi(x - theta/2) psi^dag(x + theta/2)
and Fourier transforming theta -> p.  Half-shifts are evaluated
spectrally (exact for band-limited fields), not by interpolation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as _fft

from .phase_grid import (
    MatrixPhaseField,
    PhaseGrid,
    Representation,
    fft_workers,
    ft_theta_to_p,
)


@dataclass
class SpinorField:
    """Four-component complex wave function sampled on the x grid."""

    x: np.ndarray               # (n,) grid points, uniform spacing
    values: np.ndarray          # (4, n) complex

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != (4, self.x.size):
            raise ValueError(f"values shape {self.values.shape}, expected (4, {self.x.size})")

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    def norm_squared(self) -> float:
        return float((np.abs(self.values) ** 2).sum() * self.dx)

    def density(self) -> np.ndarray:
        """Pointwise probability density psi^dag psi."""
        return (np.abs(self.values) ** 2).sum(axis=0)


@dataclass(frozen=True)
class WavepacketSpec:
    p_tilde: float
    mass: float
    x0: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("width must be positive")
        if self.mass < 0:
            raise ValueError("mass must be non-negative")

    @property
    def p0_energy(self) -> float:
        """On-shell energy sqrt(p_tilde^2 + mass^2)."""
        return float(np.hypot(self.p_tilde, self.mass))


def normalize(psi: SpinorField) -> SpinorField:
    n2 = psi.norm_squared()
    if n2 <= 0 or not np.isfinite(n2):
        raise ValueError("cannot normalize zero or non-finite spinor field")
    return SpinorField(psi.x, psi.values / np.sqrt(n2))


def _spinor_direction(spec: WavepacketSpec) -> np.ndarray:
    return np.array([spec.p0_energy + spec.mass, 0.0, 0.0, spec.p_tilde], dtype=complex)


def gaussian_wavepacket(spec: WavepacketSpec, grid: PhaseGrid) -> SpinorField:
    """Positive-energy Gaussian packet with central momentum spec.p_tilde."""
    x = grid.x
    envelope = np.exp(-((x - spec.x0) ** 2) / (2.0 * spec.width**2) + 1j * x * spec.p_tilde)
    values = _spinor_direction(spec)[:, None] * envelope[None, :]
    return normalize(SpinorField(x, values))


def cat_state(spec: WavepacketSpec, grid: PhaseGrid) -> SpinorField:
    """Superposition of two counter-propagating particle packets.

    Each momentum branch +/- p_tilde carries its own positive-energy
    spinor direction (E+m, 0, 0, +/-p_tilde), so both components are
    particles and move apart.  (A single fixed spinor direction on both
    branches would instead make the reversed branch almost purely
    negative-energy, i.e. a co-moving particle-antiparticle pair.)
    """
    x = grid.x
    envelope = np.exp(-((x - spec.x0) ** 2) / (2.0 * spec.width**2))
    up = _spinor_direction(spec)
    down = _spinor_direction(WavepacketSpec(-spec.p_tilde, spec.mass, spec.x0, spec.width))
    values = up[:, None] * (envelope * np.exp(1j * x * spec.p_tilde))[None, :]
    values = values + down[:, None] * (envelope * np.exp(-1j * x * spec.p_tilde))[None, :]
    return normalize(SpinorField(x, values))


def charge_conjugate(values: np.ndarray) -> np.ndarray:
    """Antiunitary conjugation map (psi1..4) -> (-psi4*, psi3*, psi2*, -psi1*).

    An involution: applying it twice returns the input exactly.
    """
    c = np.conj(values)
    return np.stack([-c[3], c[2], c[1], -c[0]])


def majorana_pair(psi: SpinorField) -> tuple[SpinorField, SpinorField]:
    """The two self-conjugate states psi +/- C(psi), each normalized.

    Raises if one combination vanishes (input already an eigenstate of the
    conjugation map with the opposite sign).
    """
    conj = charge_conjugate(psi.values)
    out = []
    for sign in (+1.0, -1.0):
        combo = SpinorField(psi.x, psi.values + sign * conj)
        if combo.norm_squared() < 1e-28:
            raise ValueError(f"majorana combination with sign {sign:+.0f} vanishes")
        out.append(normalize(combo))
    return out[0], out[1]


def wigner_from_spinor(psi: SpinorField, grid: PhaseGrid) -> MatrixPhaseField:
    """Lift a pure spinor state to the evolving phase-space matrix (x-p corner).

    Builds the shifted outer product psi(x - theta/2) psi^dag(x + theta/2)
    on the (x, theta) grid with spectral half-shifts, transforms theta -> p,
    and rescales so the scalar density integrates to exactly 1.
    """
    if psi.x.size != grid.n_x or abs(psi.x[0] - grid.x_min) > 1e-12 * max(1.0, abs(grid.x_min)):
        raise ValueError("spinor field is not sampled on the grid's x axis")
    # The two half-shifted copies are displaced by theta relative to each
    # other on a periodic domain of width x_max - x_min: once |theta|
    # reaches that width they overlap again and produce a spurious
    # coherence ridge at the theta edge.
    if grid.n_p * grid.dtheta > 2.0 * (grid.x_max - grid.x_min):
        raise ValueError(
            "theta extent exceeds twice the x extent: the relative half-shift "
            "wraps around the periodic x domain (shrink n_p, widen x, or widen p)"
        )

    k = 2.0 * np.pi * _fft.fftfreq(grid.n_x, grid.dx)
    psi_k = _fft.fft(psi.values, axis=1, workers=fft_workers())
    # psi(x -+ theta/2) columns for every theta, via exp(-+ i k theta / 2)
    phase = np.exp(-0.5j * np.outer(k, grid.theta))          # (n_x, n_p)
    minus = _fft.ifft(psi_k[:, :, None] * phase[None], axis=1, workers=fft_workers())
    plus = _fft.ifft(psi_k[:, :, None] * np.conj(phase)[None], axis=1, workers=fft_workers())

    data = np.einsum("axt,bxt->xtab", minus, np.conj(plus), optimize=True)
    field = ft_theta_to_p(MatrixPhaseField(grid, Representation.X_THETA, data))

    total = np.einsum("xpii->", field.data).real / 4.0 * grid.dx * grid.dp
    if not np.isfinite(total) or abs(total) < 1e-300:
        raise ValueError("degenerate state: zero phase-space norm")
    field.data /= total
    return field
