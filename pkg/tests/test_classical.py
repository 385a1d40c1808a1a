import numpy as np
import pytest

from relwigner.classical import (
    ClassicalPoint,
    classical_hamiltonians,
    diagonalization_check,
    foldy_unitary,
    integrate_trajectory,
)
from relwigner.propagator import Potential


def test_foldy_rest_identity():
    u = foldy_unitary([0, 0, 0], [0, 0, 0], 0.0, 1.0)
    assert np.abs(u - np.eye(4)).max() < 1e-15


def test_foldy_unitary_random():
    rng = np.random.default_rng(5)
    for _ in range(100):
        p = rng.uniform(-5, 5, 3)
        a = rng.uniform(-5, 5, 3)
        u = foldy_unitary(p, a, rng.uniform(-3, 3), 1.0)
        assert np.abs(u @ u.conj().T - np.eye(4)).max() < 1e-12


def test_foldy_energy_value():
    # E at p1 = 5, A = 0, m = 1 is sqrt(26); check via the diagonal check
    off, diag_err = diagonalization_check([5, 0, 0], [0, 0, 0], 0.0, 1.0, p0=np.sqrt(26.0))
    assert off < 1e-12
    assert diag_err < 1e-12    # upper block vanishes exactly on the particle shell


def test_foldy_singular_frame():
    with pytest.raises(ValueError):
        foldy_unitary([0, 0, 0], [0, 0, 0], 0.0, 0.0)


def test_classical_hamiltonians_values():
    free = Potential(mass=1.0)
    assert classical_hamiltonians(0.0, 0.0, free, 1.0) == pytest.approx((1.0, -1.0))

    shifted = Potential(a0=lambda t, x: np.full_like(np.asarray(x, float), 10.0), mass=1.0)
    hp, hm = classical_hamiltonians(0.0, 5.0, shifted, 1.0)
    assert hp == pytest.approx(10.0 + np.sqrt(26.0))
    assert hm == pytest.approx(10.0 - np.sqrt(26.0))
    assert hp - hm == pytest.approx(2.0 * np.sqrt(26.0))


def test_diagonalization_check_random():
    rng = np.random.default_rng(6)
    for _ in range(100):
        p = rng.uniform(-5, 5, 3)
        a = rng.uniform(-5, 5, 3)
        off, diag_err = diagonalization_check(p, a, rng.uniform(-5, 5), rng.uniform(0.2, 3.0),
                                              p0=rng.uniform(-5, 5))
        assert off < 1e-10
        assert diag_err < 1e-10


def test_diagonalization_check_rest():
    off, diag_err = diagonalization_check([0, 0, 0], [0, 0, 0], 0.0, 1.0, p0=0.7)
    assert off < 1e-14
    assert diag_err < 1e-14


def test_free_trajectories_both_branches():
    free = Potential(mass=1.0)
    v = 5.0 / np.sqrt(26.0)
    for sign, vel in ((+1, v), (-1, -v)):
        traj = integrate_trajectory(ClassicalPoint(0.0, 5.0, sign), free, 1.0, 0.01, 100)
        assert traj.xs[-1] == pytest.approx(vel * 1.0, abs=1e-10)
        assert np.abs(traj.ps - 5.0).max() < 1e-12


def test_trajectory_energy_conservation_klein_step():
    def a0(t, x):
        return 10.0 * (1.0 + np.tanh(4.0 * (np.asarray(x) - 5.0))) / 2.0

    def da0(t, x):
        return 10.0 * 2.0 * np.cosh(4.0 * (np.asarray(x) - 5.0)) ** -2

    pot = Potential(a0=a0, da0=da0, mass=1.0)
    traj = integrate_trajectory(ClassicalPoint(-5.0, 5.0, +1), pot, 1.0, 0.002, 10_000)
    assert traj.energy_drift < 1e-8
    # turning point: packet climbs until a0 = E - m, then returns
    assert traj.xs.max() < 5.5
    assert traj.xs[-1] < traj.xs.max()


def test_trajectory_domain_flag():
    free = Potential(mass=1.0)
    traj = integrate_trajectory(ClassicalPoint(0.0, 5.0, +1), free, 1.0, 0.01, 300,
                                x_range=(-1.0, 1.0))
    assert traj.left_domain
    assert len(traj.points) == 301


def test_classical_point_validation():
    with pytest.raises(ValueError):
        ClassicalPoint(0.0, 0.0, sign=2)
    with pytest.raises(ValueError):
        ClassicalPoint(np.nan, 0.0)
