"""Scenario runner: builds states and potentials from a config, evolves,
and writes the time series, snapshots and heatmaps."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import observables as obs
from .config import PotentialKind, ScenarioConfig, StateKind, override, to_text
from .phase_grid import MatrixPhaseField, PhaseGrid, Representation, make_grid, to_representation
from .propagator import Potential, PropagatorConfig, evolve
from .snapshot import PayloadKind, write_snapshot
from .states import (
    SpinorField,
    WavepacketSpec,
    cat_state,
    gaussian_wavepacket,
    majorana_pair,
    wigner_from_spinor,
)

log = logging.getLogger(__name__)

BOUNDARY_CELLS = 5          # warn when the support gets this close to an edge


def build_grid(config: ScenarioConfig) -> PhaseGrid:
    return make_grid(config.n_x, config.n_p, config.x_min, config.x_max,
                     config.p_min, config.p_max)


def build_potential(config: ScenarioConfig) -> Potential:
    h, c, s = config.height, config.center, config.steepness
    if config.pot_kind is PotentialKind.STEP:
        def a0(t, x):
            return 0.5 * h * (1.0 + np.tanh(s * (np.asarray(x) - c)))

        def da0(t, x):
            return 0.5 * h * s / np.cosh(s * (np.asarray(x) - c)) ** 2
    elif config.pot_kind is PotentialKind.BARRIER:
        def a0(t, x):
            x = np.asarray(x)
            return 0.5 * h * (np.tanh(s * (x + c)) + np.tanh(s * (c - x)))

        def da0(t, x):
            x = np.asarray(x)
            return 0.5 * h * s * (np.cosh(s * (x + c)) ** -2 - np.cosh(s * (c - x)) ** -2)
    else:
        a0 = da0 = None

    mass_profile = None
    if config.mass_quadratic:
        q = config.mass_quadratic
        base = config.m

        def mass_profile(x):
            return base + q * np.asarray(x) ** 2

    return Potential(a0=a0, da0=da0, mass=config.m, mass_profile=mass_profile, static=True)


def build_initial_spinor(config: ScenarioConfig, grid: PhaseGrid) -> SpinorField:
    spec = WavepacketSpec(config.p1, config.m, x0=config.x0, width=config.width)
    if config.state is StateKind.MAJORANA:
        return majorana_pair(gaussian_wavepacket(spec, grid))[0]
    if config.state is StateKind.CAT:
        return cat_state(spec, grid)
    return gaussian_wavepacket(spec, grid)


def propagator_config(config: ScenarioConfig) -> PropagatorConfig:
    return PropagatorConfig(dt=config.dt, D=config.D, splitting=config.splitting,
                            causality_check=config.causality_check)


@dataclass
class RunResult:
    config: ScenarioConfig
    series: obs.ObservableSeries
    out_dir: Path
    warnings: list[str]
    final: MatrixPhaseField


def _format_row(values) -> str:
    return ",".join(f"{v:.17g}" for v in values)


def write_series_csv(path: Path, series: obs.ObservableSeries) -> None:
    lines = [",".join(obs.SERIES_COLUMNS)]
    lines += [_format_row(row) for row in series.rows()]
    path.write_text("\n".join(lines) + "\n")


def read_series_csv(path: Path) -> dict[str, np.ndarray]:
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {name: rows[:, i] for i, name in enumerate(obs.SERIES_COLUMNS)}


def render_heatmap(path: Path, field: MatrixPhaseField, time: float,
                   potential: Potential, metadata_path: Path | None = None) -> None:
    """w0 heatmap: x horizontal, p vertical, diverging map centered at zero.

    The color range is symmetric at the 99.5th percentile of |w0| and is
    recorded in a JSON sidecar; the potential region is shaded gray.
    """
    import matplotlib
    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    g = field.grid
    w = obs.w0(field)
    vmax = float(np.percentile(np.abs(w), 99.5))
    vmax = vmax if vmax > 0 else 1e-30

    fig, ax = plt.subplots(figsize=(6.4, 4.8), dpi=120)
    ax.imshow(
        w.T, origin="lower", aspect="auto",
        extent=[g.x_min, g.x_max, g.p_min, g.p_max],
        cmap="RdBu_r", vmin=-vmax, vmax=vmax, interpolation="nearest",
    )
    profile = _potential_profile(potential, g.x)
    if profile is not None and profile.max() > 0:
        mask = profile > 0.05 * profile.max()
        overlay = np.zeros((1, g.n_x, 4))
        overlay[0, :, 3] = np.where(mask, 0.35, 0.0)      # gray, alpha on the region
        overlay[0, :, :3] = 0.5
        ax.imshow(overlay, origin="lower", aspect="auto",
                  extent=[g.x_min, g.x_max, g.p_min, g.p_max], interpolation="nearest")
    ax.set_xlabel("x")
    ax.set_ylabel("p")
    ax.set_title(f"t = {time:g}")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    if metadata_path is not None:
        metadata_path.write_text(json.dumps(
            {"time": time, "vmax": vmax, "percentile": 99.5,
             "w0_min": float(w.min()), "w0_max": float(w.max())}, indent=2) + "\n")


def _potential_profile(potential: Potential, x: np.ndarray) -> np.ndarray | None:
    parts = []
    if potential.a0 is not None:
        parts.append(np.abs(potential.scalar(0.0, x)))
    if potential.mass_profile is not None:
        parts.append(np.abs(potential.local_mass(x) - potential.mass))
    if not parts:
        return None
    return sum(parts)


def run(config: ScenarioConfig, out_dir: str | Path | None = None,
        quiet: bool = False) -> RunResult:
    """Evolve one scenario and write series.csv, snapshots and heatmaps."""
    grid = build_grid(config)
    potential = build_potential(config)
    pconfig = propagator_config(config)
    psi = build_initial_spinor(config, grid)
    q = to_representation(wigner_from_spinor(psi, grid), Representation.LAMBDA_P)

    out = Path(out_dir) if out_dir is not None else Path(config.output_dir or f"runs/{config.name}")
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.txt").write_text(to_text(config))

    series = obs.ObservableSeries()
    warnings: list[str] = []
    snap_stride = config.snapshot_every
    rec_stride = config.record_every
    cadence = np.gcd(snap_stride, rec_stride)
    n_total = int(round(config.t_end / config.dt))

    def callback(i: int, t: float, f: MatrixPhaseField) -> None:
        if i % rec_stride == 0 or i == n_total:
            if not series.times or t > series.times[-1]:
                series.add(t, obs.measure(f, config.m, config.x_threshold))
            mx, mp = obs.support_margin(f)
            if min(mx, mp) < BOUNDARY_CELLS:
                msg = (f"t={t:g}: support within {min(mx, mp)} cells of the "
                       f"{'x' if mx <= mp else 'p'} boundary")
                warnings.append(msg)
                log.warning("%s", msg)
        if i % snap_stride == 0 or i == n_total:
            stem = f"snapshot_{t:012.6f}"        # fixed width keeps sort order
            if config.snapshot_payload == "full":
                write_snapshot(out / (stem + ".bin"), grid, t, f.data,
                               PayloadKind.FULL_MATRIX)
            else:
                write_snapshot(out / (stem + ".bin"), grid, t, obs.w0(f),
                               PayloadKind.W0_REAL)
            render_heatmap(out / (stem + ".png"), f, t, potential,
                           metadata_path=out / (stem + ".json"))

    final = evolve(q, 0.0, config.t_end, pconfig, potential,
                   callback=callback, callback_every=int(cadence))
    write_series_csv(out / "series.csv", series)
    if warnings:
        (out / "warnings.log").write_text("\n".join(warnings) + "\n")
    if not quiet:
        last = series.records[-1]
        log.info("%s finished: norm=%.6f transmission=%.4f", config.name,
                 last["norm"], last["transmission"])
    return RunResult(config, series, out, warnings,
                     to_representation(final, Representation.X_P))


def sweep(config: ScenarioConfig, param: str, values, out_dir: str | Path | None = None):
    """Run the scenario once per parameter value; combine the series.

    Writes one subdirectory per value plus sweep.csv (long format with a
    leading parameter column) and an overlay plot of transmission and
    negativity against time.
    """
    from .config import SWEEPABLE, ConfigError

    if param not in SWEEPABLE:
        raise ConfigError([f"parameter {param!r} is not sweepable (one of {sorted(SWEEPABLE)})"])
    values = list(values)
    if not values:
        raise ConfigError(["empty sweep value list"])

    base = Path(out_dir) if out_dir is not None else Path(config.output_dir or f"runs/{config.name}_sweep")
    base.mkdir(parents=True, exist_ok=True)
    results = []
    for v in values:
        sub = override(config, **{SWEEPABLE[param]: v},
                       name=f"{config.name}_{param}={v:g}", output_dir=None)
        results.append(run(sub, out_dir=base / f"{param}={v:g}"))

    lines = [param + "," + ",".join(obs.SERIES_COLUMNS)]
    for v, res in zip(values, results):
        for row in res.series.rows():
            lines.append(f"{v:.17g}," + _format_row(row))
    (base / "sweep.csv").write_text("\n".join(lines) + "\n")
    _sweep_overlay(base / "sweep.png", param, values, results)
    return results


def _sweep_overlay(path: Path, param: str, values, results) -> None:
    import matplotlib
    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 2, figsize=(10, 4), dpi=120)
    for v, res in zip(values, results):
        t = res.series.column("t")
        axes[0].plot(t, res.series.column("transmission"), label=f"{param}={v:g}")
        axes[1].plot(t, np.abs(res.series.column("negativity")), label=f"{param}={v:g}")
    axes[0].set_xlabel("t")
    axes[0].set_ylabel("transmission")
    axes[1].set_xlabel("t")
    axes[1].set_ylabel("|negativity|")
    axes[0].legend()
    axes[1].legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
