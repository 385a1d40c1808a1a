import numpy as np
import pytest

from relwigner import observables as obs
from relwigner.clifford import alpha, dense_expm, gamma
from relwigner.phase_grid import Representation, make_grid, to_representation
from relwigner.propagator import (
    NumericsError,
    Potential,
    PropagatorConfig,
    Splitting,
    check_causality,
    evolve,
    evolve_spinor,
    free_potential,
    kinetic_exponential,
    kinetic_step,
    potential_exponential,
    potential_step,
    step,
)
from relwigner.states import WavepacketSpec, gaussian_wavepacket, wigner_from_spinor


def kinetic_matrix(p1, p2, m):
    return p1 * alpha(1) + p2 * alpha(2) + 0.5 * m * gamma(0)


def potential_matrix(a0, a_vec, m_half):
    out = a0 * np.eye(4, dtype=complex) + m_half * gamma(0)
    for k in range(3):
        out -= a_vec[k] * alpha(k + 1)
    return out


def test_kinetic_exponential_rest():
    got = kinetic_exponential(0.0, 0.0, 1.0, 0.01, +1)
    expected = np.diag(np.exp([-0.005j, -0.005j, 0.005j, 0.005j]))
    assert np.abs(got - expected).max() < 1e-15


def test_kinetic_exponential_zero_dt():
    assert np.abs(kinetic_exponential(1.3, -0.4, 1.0, 0.0, +1) - np.eye(4)).max() == 0.0


def test_exponentials_match_dense_oracle():
    rng = np.random.default_rng(42)
    for _ in range(300):
        p1, p2 = rng.uniform(-10, 10, 2)
        m = rng.uniform(0, 3)
        dt = rng.uniform(0, 0.2)
        sign = int(rng.choice([-1, 1]))
        got = kinetic_exponential(p1, p2, m, dt, sign)
        ref = dense_expm(-1j * sign * dt * kinetic_matrix(p1, p2, m))
        assert np.abs(got - ref).max() < 1e-12

        a0 = rng.uniform(-10, 10)
        a_vec = rng.uniform(-5, 5, 3)
        m_half = rng.uniform(0, 3)
        got = potential_exponential(a0, a_vec, m_half, dt, sign)
        ref = dense_expm(-1j * sign * dt * potential_matrix(a0, a_vec, m_half))
        assert np.abs(got - ref).max() < 1e-12


def test_exponentials_unitary():
    u = kinetic_exponential(1.3, -0.4, 1.0, 0.01, +1)
    assert np.abs(u @ u.conj().T - np.eye(4)).max() < 1e-14
    v = potential_exponential(10.0, (0.3, -0.2, 0.1), 0.5, 0.01, +1)
    assert np.abs(v @ v.conj().T - np.eye(4)).max() < 1e-14


def test_potential_exponential_reduces_to_kinetic_at_rest():
    m = 1.0
    got = potential_exponential(0.0, (0.0, 0.0, 0.0), 0.5 * m, 0.01, +1)
    ref = kinetic_exponential(0.0, 0.0, m, 0.01, +1)
    assert np.abs(got - ref).max() < 1e-15


def test_potential_exponential_scalar_phase():
    got = potential_exponential(10.0, (0.0, 0.0, 0.0), 0.5, 0.01, +1)
    ref = np.exp(-0.1j) * kinetic_exponential(0.0, 0.0, 1.0, 0.01, +1)
    assert np.abs(got - ref).max() < 1e-14


GRID = make_grid(128, 128, -20, 20, -20, 20)
SPEC = WavepacketSpec(p_tilde=5.0, mass=1.0)


def lifted(spec=SPEC, grid=GRID):
    return wigner_from_spinor(gaussian_wavepacket(spec, grid), grid)


def test_kinetic_step_requires_lambda_p():
    q = lifted()
    with pytest.raises(ValueError):
        kinetic_step(q, 1.0, 0.01)


def test_potential_step_damping_factor():
    q = to_representation(lifted(), Representation.X_THETA)
    D, dt = 0.01, 0.01
    out = potential_step(q, Potential(mass=0.0), 0.0, dt, D)
    expected = q.data * np.exp(-D * dt * GRID.theta**2)[None, :, None, None]
    assert np.abs(out.data - expected).max() < 1e-14


def test_potential_step_theta_zero_slice_invariant_under_dephasing():
    q = to_representation(lifted(), Representation.X_THETA)
    pot = free_potential(1.0)
    no_deph = potential_step(q, pot, 0.0, 0.01, 0.0)
    with_deph = potential_step(q, pot, 0.0, 0.01, 0.05)
    i0 = GRID.n_p // 2
    assert np.abs(no_deph.data[:, i0] - with_deph.data[:, i0]).max() < 1e-14


def test_potential_step_free_keeps_x_marginal():
    q = lifted()
    before = obs.marginal_x(q)
    out = potential_step(
        to_representation(q, Representation.X_THETA), free_potential(1.0), 0.0, 0.01, 0.0
    )
    after = obs.marginal_x(to_representation(out, Representation.X_P))
    assert np.abs(after - before).max() < 1e-12


def test_step_massless_free_equals_kinetic_step():
    q = to_representation(lifted(WavepacketSpec(5.0, 0.0)), Representation.LAMBDA_P)
    cfg = PropagatorConfig(dt=0.01)
    full = step(q, 0.0, cfg, free_potential(0.0))
    kin = kinetic_step(q, 0.0, 0.01)
    assert np.abs(full.data - kin.data).max() < 1e-12 * np.abs(kin.data).max()


def test_one_step_preserves_hermiticity_with_dephasing():
    # needs the x-Nyquist well above the packet's momentum support
    grid = make_grid(256, 256, -20, 20, -20, 20)
    q = to_representation(lifted(grid=grid), Representation.LAMBDA_P)
    cfg = PropagatorConfig(dt=0.01, D=0.01)
    out = step(q, 0.0, cfg, free_potential(1.0))
    xp = to_representation(out, Representation.X_P)
    assert obs.hermiticity_defect(xp) < 1e-10


def test_cached_stepper_matches_composed_step():
    from relwigner.propagator import SplitOperator

    pot = klein_step_potential()
    for splitting in Splitting:
        cfg = PropagatorConfig(dt=0.01, D=0.004, splitting=splitting)
        q = to_representation(lifted(), Representation.LAMBDA_P)
        composed = step(q, 0.0, cfg, pot)
        cached = SplitOperator(GRID, pot, cfg).step(q.copy(), 0.0)
        assert np.abs(composed.data - cached.data).max() < 1e-12


def test_free_norm_conserved_100_steps():
    q = to_representation(lifted(), Representation.LAMBDA_P)
    out = evolve(q, 0.0, 1.0, PropagatorConfig(dt=0.01), free_potential(1.0))
    xp = to_representation(out, Representation.X_P)
    assert obs.norm(xp) == pytest.approx(1.0, abs=1e-10)


def test_free_group_velocity():
    q = lifted()
    x0 = obs.x_mean(q)
    out = evolve(q, 0.0, 1.0, PropagatorConfig(dt=0.01), free_potential(1.0))
    x1 = obs.x_mean(to_representation(out, Representation.X_P))
    v = 5.0 / np.sqrt(26.0)
    assert abs((x1 - x0) - v) < 5e-3


def test_evolve_zero_duration_returns_input():
    q = to_representation(lifted(), Representation.LAMBDA_P)
    out = evolve(q, 0.0, 0.0, PropagatorConfig(dt=0.01), free_potential(1.0))
    assert np.abs(out.data - q.data).max() == 0.0


def test_evolve_callback_cadence():
    q = lifted()
    seen = []
    evolve(
        q, 0.0, 0.1, PropagatorConfig(dt=0.01), free_potential(1.0),
        callback=lambda i, t, f: seen.append((i, round(t, 10), f.rep)),
        callback_every=5,
    )
    assert [s[0] for s in seen] == [0, 5, 10]
    assert all(s[2] is Representation.X_P for s in seen)


def test_evolve_detects_nonfinite():
    q = to_representation(lifted(), Representation.LAMBDA_P)
    q.data[0, 0, 0, 0] = np.nan
    with pytest.raises(NumericsError) as err:
        evolve(q, 0.0, 0.05, PropagatorConfig(dt=0.01), free_potential(1.0))
    assert err.value.step == 1


def test_causality_check():
    check_causality(0.01, 1.0)
    with pytest.raises(ValueError):
        check_causality(0.3, 1.0)
    with pytest.raises(ValueError):
        PropagatorConfig(dt=-0.1)


def klein_step_potential():
    def a0(t, x):
        return 10.0 * (1.0 + np.tanh(4.0 * (np.asarray(x) - 5.0))) / 2.0

    return Potential(a0=a0, mass=1.0)


def test_spinor_cross_check_on_klein_step():
    grid = make_grid(128, 128, -20, 20, -20, 20)
    spec = WavepacketSpec(p_tilde=5.0, mass=1.0, x0=-2.0)
    psi = gaussian_wavepacket(spec, grid)
    pot = klein_step_potential()
    cfg = PropagatorConfig(dt=0.01)

    evolved_spinor = evolve_spinor(psi, 0.0, 1.0, cfg, pot)
    from_spinor = obs.w0(wigner_from_spinor(evolved_spinor, grid))

    q = to_representation(wigner_from_spinor(psi, grid), Representation.LAMBDA_P)
    evolved_field = evolve(q, 0.0, 1.0, cfg, pot)
    direct = obs.w0(to_representation(evolved_field, Representation.X_P))

    assert np.abs(from_spinor - direct).max() < 1e-6


def test_strang_more_accurate_than_first_order():
    grid = make_grid(64, 64, -20, 20, -20, 20)
    psi = gaussian_wavepacket(WavepacketSpec(5.0, 1.0, x0=-2.0), grid)
    pot = klein_step_potential()
    q0 = to_representation(wigner_from_spinor(psi, grid), Representation.LAMBDA_P)

    ref = evolve(q0.copy(), 0.0, 0.4, PropagatorConfig(dt=0.4 / 256, splitting=Splitting.STRANG), pot)
    w_ref = obs.w0(to_representation(ref, Representation.X_P))

    errs = {}
    for split in Splitting:
        out = evolve(q0.copy(), 0.0, 0.4, PropagatorConfig(dt=0.05, splitting=split), pot)
        errs[split] = np.abs(obs.w0(to_representation(out, Representation.X_P)) - w_ref).max()
    assert errs[Splitting.STRANG] < 0.2 * errs[Splitting.FIRST_ORDER]


def test_mass_modulated_evolution_conserves_norm():
    # x-dependent mass runs through the diagonal potential fast path;
    # needs the x-Nyquist well above the fringe wavenumber 2*p1
    grid = make_grid(256, 128, -16, 16, -20, 20)
    psi = gaussian_wavepacket(WavepacketSpec(5.0, 1.0), grid)
    from relwigner.states import majorana_pair

    maj = majorana_pair(psi)[0]
    pot = Potential(mass=1.0, mass_profile=lambda x: 1.0 + 0.05 * np.asarray(x) ** 2)
    q = to_representation(wigner_from_spinor(maj, grid), Representation.LAMBDA_P)
    out = evolve(q, 0.0, 0.5, PropagatorConfig(dt=0.01, D=0.01), pot)
    xp = to_representation(out, Representation.X_P)
    assert obs.norm(xp) == pytest.approx(1.0, abs=1e-9)
    assert obs.hermiticity_defect(xp) < 1e-9
