"""Scenario configuration: plain-text key=value files with [section] headers.

Top-level keys name the common physics parameters; [grid] and [potential]
sections hold the discretization and field details.  Unknown keys are
rejected with their line number, and every constraint violation is
reported at once.  Built-in scenario kinds fully determine their
potentials and initial state; explicit keys override the kind defaults.
"""
from __future__ import annotations

from dataclasses import dataclass, fields, replace
from enum import Enum
from pathlib import Path

from .propagator import Splitting, causality_bound


class ConfigError(Exception):
    """Carries the full list of configuration problems."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class ScenarioKind(Enum):
    MAJORANA_FREE = "MAJORANA_FREE"
    MAJORANA_MASS = "MAJORANA_MASS"
    CAT_FREE = "CAT_FREE"
    KLEIN_STEP = "KLEIN_STEP"
    KLEIN_BARRIER = "KLEIN_BARRIER"
    CUSTOM = "CUSTOM"


class PotentialKind(Enum):
    NONE = "none"
    STEP = "step"
    BARRIER = "barrier"


class StateKind(Enum):
    GAUSSIAN = "gaussian"
    MAJORANA = "majorana"
    CAT = "cat"


@dataclass
class ScenarioConfig:
    kind: ScenarioKind
    name: str = ""
    # grid; n_p = 256 keeps the theta span inside twice the x extent
    # (a 512x512 grid on [-20,20]^2 puts the wrap-around ridge of the
    # half-shifted products right at the theta edge)
    n_x: int = 512
    n_p: int = 256
    x_min: float = -20.0
    x_max: float = 20.0
    p_min: float = -20.0
    p_max: float = 20.0
    # wavepacket
    p1: float = 5.0
    m: float = 1.0
    x0: float | None = None
    width: float = 1.0
    state: StateKind | None = None
    # potential
    pot_kind: PotentialKind | None = None
    height: float | None = None
    center: float | None = None
    steepness: float = 4.0
    mass_quadratic: float | None = None
    # propagation
    D: float = 0.0
    dt: float = 0.01
    t_end: float | None = None
    splitting: Splitting = Splitting.FIRST_ORDER
    causality_check: bool = False
    # outputs
    snapshot_every: int = 100
    record_every: int = 10
    snapshot_payload: str = "w0"
    x_threshold: float | None = None
    output_dir: str | None = None


_KIND_DEFAULTS = {
    ScenarioKind.MAJORANA_FREE: dict(
        state=StateKind.MAJORANA, pot_kind=PotentialKind.NONE, x0=0.0,
        t_end=12.0, x_threshold=0.0, mass_quadratic=0.0),
    ScenarioKind.MAJORANA_MASS: dict(
        state=StateKind.MAJORANA, pot_kind=PotentialKind.NONE, x0=0.0,
        t_end=14.0, x_threshold=0.0, mass_quadratic=0.05),
    ScenarioKind.CAT_FREE: dict(
        state=StateKind.CAT, pot_kind=PotentialKind.NONE, x0=0.0,
        t_end=12.0, x_threshold=0.0, mass_quadratic=0.0),
    ScenarioKind.KLEIN_STEP: dict(
        state=StateKind.GAUSSIAN, pot_kind=PotentialKind.STEP, x0=-5.0,
        t_end=12.0, height=10.0, center=5.0, x_threshold=5.0, mass_quadratic=0.0),
    ScenarioKind.KLEIN_BARRIER: dict(
        state=StateKind.GAUSSIAN, pot_kind=PotentialKind.BARRIER, x0=-10.0,
        t_end=24.0, height=10.0, center=4.0, x_threshold=4.0, mass_quadratic=0.0),
    ScenarioKind.CUSTOM: dict(
        state=StateKind.GAUSSIAN, pot_kind=PotentialKind.NONE, x0=0.0,
        t_end=12.0, height=10.0, center=5.0, x_threshold=0.0, mass_quadratic=0.0),
}

_GENERIC_DEFAULTS = dict(height=10.0, center=5.0)

# (section, key) -> (config field, parser)
def _bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


_SCHEMA = {
    ("", "kind"): ("kind", lambda s: ScenarioKind(s.strip().upper())),
    ("", "name"): ("name", str.strip),
    ("", "p1"): ("p1", float),
    ("", "m"): ("m", float),
    ("", "x0"): ("x0", float),
    ("", "width"): ("width", float),
    ("", "state"): ("state", lambda s: StateKind(s.strip().lower())),
    ("", "d"): ("D", float),
    ("", "dt"): ("dt", float),
    ("", "t_end"): ("t_end", float),
    ("", "splitting"): ("splitting", lambda s: Splitting(s.strip().lower())),
    ("", "causality_check"): ("causality_check", _bool),
    ("", "snapshot_every"): ("snapshot_every", int),
    ("", "record_every"): ("record_every", int),
    ("", "snapshot_payload"): ("snapshot_payload", str.strip),
    ("", "x_threshold"): ("x_threshold", float),
    ("", "output_dir"): ("output_dir", str.strip),
    ("grid", "n_x"): ("n_x", int),
    ("grid", "n_p"): ("n_p", int),
    ("grid", "x_min"): ("x_min", float),
    ("grid", "x_max"): ("x_max", float),
    ("grid", "p_min"): ("p_min", float),
    ("grid", "p_max"): ("p_max", float),
    ("potential", "kind"): ("pot_kind", lambda s: PotentialKind(s.strip().lower())),
    ("potential", "height"): ("height", float),
    ("potential", "center"): ("center", float),
    ("potential", "steepness"): ("steepness", float),
    ("potential", "mass_quadratic"): ("mass_quadratic", float),
}

SWEEPABLE = {"D": "D", "p1": "p1", "height": "height"}


def parse_text(text: str, source: str = "<config>") -> ScenarioConfig:
    errors: list[str] = []
    values: dict[str, object] = {}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(("#", ";")):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in ("grid", "potential"):
                errors.append(f"{source}:{lineno}: unknown section [{section}]")
                section = ""
            continue
        if "=" not in line:
            errors.append(f"{source}:{lineno}: expected key=value, got {line!r}")
            continue
        key, _, val = line.partition("=")
        key = key.strip()
        entry = _SCHEMA.get((section, key.lower()))
        if entry is None:
            where = f"[{section}] " if section else ""
            errors.append(f"{source}:{lineno}: unknown key {where}{key!r}")
            continue
        field_name, parser = entry
        try:
            parsed = parser(val.strip())
        except (ValueError, KeyError) as exc:
            errors.append(f"{source}:{lineno}: bad value for {key!r}: {exc}")
            continue
        if field_name in values:
            errors.append(f"{source}:{lineno}: duplicate key {key!r}")
            continue
        values[field_name] = parsed

    if "kind" not in values and not errors:
        errors.append(f"{source}: missing required key 'kind'")
    if errors:
        raise ConfigError(errors)

    config = ScenarioConfig(**values)           # type: ignore[arg-type]
    config = apply_defaults(config)
    violations = validate(config)
    if violations:
        raise ConfigError(violations)
    return config


def parse_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError([f"cannot read {path}: {exc}"]) from exc
    return parse_text(text, source=str(path))


def apply_defaults(config: ScenarioConfig) -> ScenarioConfig:
    updates: dict[str, object] = {}
    defaults = dict(_GENERIC_DEFAULTS)
    defaults.update(_KIND_DEFAULTS[config.kind])
    for key, val in defaults.items():
        if getattr(config, key) is None:
            updates[key] = val
    if not config.name:
        updates["name"] = config.kind.value.lower()
    return replace(config, **updates)


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def validate(config: ScenarioConfig) -> list[str]:
    errs = []
    for name, n in (("n_x", config.n_x), ("n_p", config.n_p)):
        if n < 8 or not _is_pow2(n):
            errs.append(f"{name} must be a power of two >= 8, got {n}")
    if config.x_max <= config.x_min:
        errs.append("empty x range")
    if config.p_max <= config.p_min:
        errs.append("empty p range")
    if config.dt <= 0:
        errs.append(f"dt must be positive, got {config.dt}")
    if config.t_end is not None and config.t_end < 0:
        errs.append(f"t_end must be non-negative, got {config.t_end}")
    if config.D < 0:
        errs.append(f"D must be non-negative, got {config.D}")
    if config.width <= 0:
        errs.append(f"width must be positive, got {config.width}")
    if config.m < 0:
        errs.append(f"m must be non-negative, got {config.m}")
    if config.snapshot_every < 1:
        errs.append("snapshot_every must be >= 1")
    if config.record_every < 1:
        errs.append("record_every must be >= 1")
    if config.snapshot_payload not in ("w0", "full"):
        errs.append(f"snapshot_payload must be 'w0' or 'full', got {config.snapshot_payload!r}")
    if config.causality_check and config.m > 0:
        bound = causality_bound(config.m)
        if config.D >= bound:
            errs.append(
                f"D={config.D:g} violates the causal dephasing bound D < {bound:g} for m={config.m:g}"
            )
    if config.x_threshold is not None and not (
        config.x_min <= config.x_threshold <= config.x_max
    ):
        errs.append(f"x_threshold {config.x_threshold} outside the x range")
    return errs


def override(config: ScenarioConfig, **kwargs) -> ScenarioConfig:
    """Apply CLI/sweep overrides and revalidate."""
    valid = {f.name for f in fields(ScenarioConfig)}
    unknown = set(kwargs) - valid
    if unknown:
        raise ConfigError([f"unknown override {k!r}" for k in sorted(unknown)])
    out = replace(config, **kwargs)
    out = apply_defaults(out)
    violations = validate(out)
    if violations:
        raise ConfigError(violations)
    return out


def to_text(config: ScenarioConfig) -> str:
    """Resolved configuration in the same key=value format (round-trips)."""
    lines = [
        f"kind={config.kind.value}",
        f"name={config.name}",
        f"p1={config.p1!r}",
        f"m={config.m!r}",
        f"x0={config.x0!r}",
        f"width={config.width!r}",
        f"state={config.state.value}",
        f"D={config.D!r}",
        f"dt={config.dt!r}",
        f"t_end={config.t_end!r}",
        f"splitting={config.splitting.value}",
        f"causality_check={config.causality_check}",
        f"snapshot_every={config.snapshot_every}",
        f"record_every={config.record_every}",
        f"snapshot_payload={config.snapshot_payload}",
        f"x_threshold={config.x_threshold!r}",
        "",
        "[grid]",
        f"n_x={config.n_x}",
        f"n_p={config.n_p}",
        f"x_min={config.x_min!r}",
        f"x_max={config.x_max!r}",
        f"p_min={config.p_min!r}",
        f"p_max={config.p_max!r}",
        "",
        "[potential]",
        f"kind={config.pot_kind.value}",
        f"height={config.height!r}",
        f"center={config.center!r}",
        f"steepness={config.steepness!r}",
        f"mass_quadratic={config.mass_quadratic!r}",
    ]
    if config.output_dir:
        lines.insert(1, f"output_dir={config.output_dir}")
    return "\n".join(lines) + "\n"
