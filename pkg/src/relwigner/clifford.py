"""Dirac matrix algebra: gamma and alpha matrices, Lorentz rotors.

Everything uses the standard Dirac representation with metric signature
(+,-,-,-): gamma^0 = diag(1,1,-1,-1) and the spatial gammas built from
Pauli blocks.  All matrices are 4x4 complex with integer-valued entries,
so the Clifford relations hold exactly in floating point.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm as _scipy_expm

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

_ZERO2 = np.zeros((2, 2), dtype=complex)
_EYE2 = np.eye(2, dtype=complex)

_GAMMA = (
    np.block([[_EYE2, _ZERO2], [_ZERO2, -_EYE2]]),
    np.block([[_ZERO2, _PAULI[0]], [-_PAULI[0], _ZERO2]]),
    np.block([[_ZERO2, _PAULI[1]], [-_PAULI[1], _ZERO2]]),
    np.block([[_ZERO2, _PAULI[2]], [-_PAULI[2], _ZERO2]]),
)
_ALPHA = tuple(_GAMMA[0] @ _GAMMA[k] for k in (1, 2, 3))

for _m in _GAMMA + _ALPHA:
    _m.setflags(write=False)


def gamma(mu: int) -> np.ndarray:
    """Contravariant gamma matrix gamma^mu, mu in 0..3."""
    if mu not in (0, 1, 2, 3):
        raise IndexError(f"gamma index must be in 0..3, got {mu}")
    return _GAMMA[mu]


def alpha(k: int) -> np.ndarray:
    """alpha^k = gamma^0 gamma^k, k in 1..3.  Hermitian, squares to 1."""
    if k not in (1, 2, 3):
        raise IndexError(f"alpha index must be in 1..3, got {k}")
    return _ALPHA[k - 1]


def dense_expm(a: np.ndarray) -> np.ndarray:
    """Dense matrix exponential (scaling-and-squaring Pade).

    Reference oracle for every closed-form matrix exponential in the
    propagator module; also evaluates the rotor exponentials below.
    """
    return _scipy_expm(np.asarray(a, dtype=complex))


@dataclass(frozen=True)
class RotorParams:
    """Boost rapidities and rotation angles of a restricted Lorentz transform."""

    eta: tuple[float, float, float] = (0.0, 0.0, 0.0)
    theta_rot: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        vals = (*self.eta, *self.theta_rot)
        if len(self.eta) != 3 or len(self.theta_rot) != 3:
            raise ValueError("eta and theta_rot must have 3 components each")
        if not np.all(np.isfinite(vals)):
            raise ValueError("rotor parameters must be finite")


# Levi-Civita symbol on 1..3 (stored 0-based)
_EPS = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _EPS[_i, _j, _k] = 1.0
    _EPS[_i, _k, _j] = -1.0


def lorentz_rotor(params: RotorParams) -> np.ndarray:
    """Spin+(1,3) rotor exp(eta_k g0 g^k / 2) exp(eps_jkl theta^j g^k g^l / 4)."""
    boost_gen = sum(
        0.5 * params.eta[k] * (_GAMMA[0] @ _GAMMA[k + 1]) for k in range(3)
    )
    rot_gen = np.zeros((4, 4), dtype=complex)
    for j in range(3):
        for k in range(3):
            for l in range(3):
                if _EPS[j, k, l]:
                    rot_gen += (
                        0.25 * _EPS[j, k, l] * params.theta_rot[j]
                        * (_GAMMA[k + 1] @ _GAMMA[l + 1])
                    )
    return dense_expm(boost_gen) @ dense_expm(rot_gen)


def rotor_membership_defect(rotor: np.ndarray) -> float:
    """Max-norm of L g0 L^dag g0 - 1; zero exactly on Spin+(1,3)."""
    test = rotor @ _GAMMA[0] @ rotor.conj().T @ _GAMMA[0]
    return float(np.abs(test - np.eye(4)).max())


def rotor_inverse(rotor: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Inverse g0 L^dag g0, valid only for group members."""
    defect = rotor_membership_defect(rotor)
    if defect > tol:
        raise ValueError(f"not a Lorentz rotor: membership defect {defect:.3e}")
    return _GAMMA[0] @ rotor.conj().T @ _GAMMA[0]


def slash(u) -> np.ndarray:
    """u^mu gamma_mu for a real 4-vector of contravariant components."""
    u = np.asarray(u, dtype=float)
    return u[0] * _GAMMA[0] - u[1] * _GAMMA[1] - u[2] * _GAMMA[2] - u[3] * _GAMMA[3]


def transform_vector(rotor: np.ndarray, u, tol: float = 1e-8) -> np.ndarray:
    """Push a 4-vector through L u-slash L^{-1}; returns contravariant components.

    Raises if the conjugated matrix does not lie in the gamma span (which
    happens for non-rotor input).
    """
    conjugated = rotor @ slash(u) @ rotor_inverse(rotor, tol=tol)
    comps = np.array([np.trace(_GAMMA[mu] @ conjugated) / 4.0 for mu in range(4)])
    residual = conjugated - slash(comps.real)
    if np.abs(residual).max() > tol or np.abs(comps.imag).max() > tol:
        raise ValueError("conjugated vector left the gamma basis (non-rotor input)")
    return comps.real


def minkowski_dot(u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(u[0] * v[0] - u[1:] @ v[1:])
