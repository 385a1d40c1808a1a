"""Command-line interface: run scenarios, sweep parameters, self-check.

Exit codes: 0 ok, 1 configuration error, 2 numerical abort, 3 I/O error.
The environment variable RELWIGNER_WORKERS overrides the FFT worker count.
"""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .config import ConfigError, SWEEPABLE, override, parse_config
from .propagator import NumericsError
from .snapshot import SnapshotError


class _Parser(argparse.ArgumentParser):
    def error(self, message):          # argparse usage errors are config errors
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_run_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="scenario config file")
    p.add_argument("--out", help="output directory (default runs/<name>)")
    p.add_argument("--grid", help="override grid size as NxM")
    p.add_argument("--dt", type=float, help="override time step")
    p.add_argument("--t-end", type=float, dest="t_end", help="override end time")
    p.add_argument("--snapshot-every", type=int, dest="snapshot_every",
                   help="override snapshot stride (steps)")


def _load_config(args) -> "ScenarioConfig":
    config = parse_config(args.config)
    updates = {}
    if args.grid:
        try:
            nx, _, np_ = args.grid.lower().partition("x")
            updates["n_x"] = int(nx)
            updates["n_p"] = int(np_)
        except ValueError as exc:
            raise ConfigError([f"bad --grid value {args.grid!r}: {exc}"]) from exc
    for key in ("dt", "t_end", "snapshot_every"):
        val = getattr(args, key, None)
        if val is not None:
            updates[key] = val
    if updates:
        config = override(config, **updates)
    return config


def _cmd_run(args) -> int:
    from .runner import run

    config = _load_config(args)
    result = run(config, out_dir=args.out)
    last = result.series.records[-1]
    print(f"{config.name}: t_end={config.t_end:g} norm={last['norm']:.9f} "
          f"transmission={last['transmission']:.4f} "
          f"antiparticle_fraction={last['antiparticle_fraction']:.4f} "
          f"negativity={last['negativity']:.5f}")
    print(f"outputs in {result.out_dir}")
    if result.warnings:
        print(f"{len(result.warnings)} boundary warnings (see warnings.log)")
    return 0


def _cmd_sweep(args) -> int:
    from .runner import sweep

    config = _load_config(args)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise ConfigError([f"bad --values list {args.values!r}: {exc}"]) from exc
    results = sweep(config, args.param, values, out_dir=args.out)
    for v, res in zip(values, results):
        last = res.series.records[-1]
        print(f"{args.param}={v:g}: transmission={last['transmission']:.4f} "
              f"negativity={last['negativity']:.5f}")
    return 0


def _cmd_check(args) -> int:
    """Built-in invariant suite: algebra, transforms, exponentials, frames."""
    from . import clifford as cl
    from .classical import diagonalization_check
    from .phase_grid import MatrixPhaseField, Representation, make_grid, to_representation
    from .propagator import kinetic_exponential, potential_exponential

    rng = np.random.default_rng(2024)
    failures = 0

    def report(label, worst, tol):
        nonlocal failures
        ok = worst < tol
        failures += 0 if ok else 1
        print(f"{'PASS' if ok else 'FAIL'}  {label}: worst {worst:.3e} (tol {tol:g})")

    worst = 0.0
    metric = np.diag([1.0, -1.0, -1.0, -1.0])
    for mu in range(4):
        for nu in range(4):
            anti = cl.gamma(mu) @ cl.gamma(nu) + cl.gamma(nu) @ cl.gamma(mu)
            worst = max(worst, float(np.abs(anti - 2 * metric[mu, nu] * np.eye(4)).max()))
    report("Clifford relations", worst, 1e-15)

    worst = 0.0
    for _ in range(100):
        params = cl.RotorParams(tuple(rng.uniform(-1, 1, 3)), tuple(rng.uniform(-1, 1, 3)))
        rotor = cl.lorentz_rotor(params)
        worst = max(worst, cl.rotor_membership_defect(rotor))
        worst = max(worst, float(np.abs(rotor @ cl.rotor_inverse(rotor) - np.eye(4)).max()))
    report("Lorentz rotor identities", worst, 1e-10)

    grid = make_grid(64, 64, -20, 20, -15, 15)
    data = rng.normal(size=(64, 64, 4, 4)) + 1j * rng.normal(size=(64, 64, 4, 4))
    f = MatrixPhaseField(grid, Representation.X_THETA, data)
    worst = 0.0
    for target in Representation:
        back = to_representation(to_representation(f, target), Representation.X_THETA)
        worst = max(worst, float(np.abs(back.data - data).max() / np.abs(data).max()))
    report("Fourier round trips", worst, 1e-12)

    worst = 0.0
    for _ in range(200):
        p1, p2 = rng.uniform(-10, 10, 2)
        m = rng.uniform(0, 3)
        dt = rng.uniform(0, 0.2)
        got = kinetic_exponential(p1, p2, m, dt, +1)
        ref = cl.dense_expm(-1j * dt * (p1 * cl.alpha(1) + p2 * cl.alpha(2) + 0.5 * m * cl.gamma(0)))
        worst = max(worst, float(np.abs(got - ref).max()))
        a0 = rng.uniform(-10, 10)
        av = rng.uniform(-5, 5, 3)
        mh = rng.uniform(0, 3)
        got = potential_exponential(a0, av, mh, dt, +1)
        gen = a0 * np.eye(4) + mh * cl.gamma(0) - sum(av[k] * cl.alpha(k + 1) for k in range(3))
        worst = max(worst, float(np.abs(got - cl.dense_expm(-1j * dt * gen)).max()))
    report("closed-form exponentials vs dense oracle", worst, 1e-12)

    worst = 0.0
    for _ in range(100):
        off, diag_err = diagonalization_check(
            rng.uniform(-5, 5, 3), rng.uniform(-5, 5, 3),
            rng.uniform(-5, 5), rng.uniform(0.2, 3.0), p0=rng.uniform(-5, 5))
        worst = max(worst, off, diag_err)
    report("classical-limit diagonalization", worst, 1e-10)

    print("self-check:", "all passed" if failures == 0 else f"{failures} FAILED")
    return 0 if failures == 0 else 2


def main(argv=None) -> int:
    parser = _Parser(prog="relwigner",
                     description="Dirac open-system phase-space simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario")
    _add_run_overrides(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a scenario over a parameter sweep")
    _add_run_overrides(p_sweep)
    p_sweep.add_argument("--param", required=True, choices=sorted(SWEEPABLE),
                         help="parameter to sweep")
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_check = sub.add_parser("check", help="run the built-in invariant suite")
    p_check.set_defaults(func=_cmd_check)

    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return 1
    except NumericsError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 2
    except (OSError, SnapshotError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
