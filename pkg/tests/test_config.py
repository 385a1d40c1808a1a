import pytest

from relwigner.config import (
    ConfigError,
    PotentialKind,
    ScenarioConfig,
    ScenarioKind,
    StateKind,
    apply_defaults,
    override,
    parse_config,
    parse_text,
    to_text,
)
from relwigner.propagator import Splitting


def test_minimal_file_defaults(tmp_path):
    path = tmp_path / "s.cfg"
    path.write_text("kind=KLEIN_STEP\n")
    cfg = parse_config(path)
    assert cfg.kind is ScenarioKind.KLEIN_STEP
    assert cfg.p1 == 5.0
    assert cfg.m == 1.0
    assert (cfg.n_x, cfg.n_p) == (512, 256)
    assert (cfg.x_min, cfg.x_max, cfg.p_min, cfg.p_max) == (-20, 20, -20, 20)
    assert cfg.dt == 0.01
    assert cfg.D == 0.0
    assert cfg.splitting is Splitting.FIRST_ORDER
    assert cfg.state is StateKind.GAUSSIAN
    assert cfg.pot_kind is PotentialKind.STEP
    assert cfg.height == 10.0
    assert cfg.x0 == -5.0
    assert cfg.x_threshold == 5.0
    assert cfg.name == "klein_step"


def test_causality_rejection():
    with pytest.raises(ConfigError) as err:
        parse_text("kind=CAT_FREE\nD=0.3\nm=1\ncausality_check=true\n")
    assert any("causal" in e for e in err.value.errors)


def test_missing_kind():
    with pytest.raises(ConfigError) as err:
        parse_text("dt=0.01\n")
    assert any("kind" in e for e in err.value.errors)


def test_unknown_key_reports_line():
    with pytest.raises(ConfigError) as err:
        parse_text("kind=CAT_FREE\nbogus=1\n", source="f.cfg")
    assert any("f.cfg:2" in e and "bogus" in e for e in err.value.errors)


def test_all_violations_reported():
    text = "kind=CUSTOM\ndt=-1\nwidth=0\n[grid]\nn_x=100\n"
    with pytest.raises(ConfigError) as err:
        parse_text(text)
    msgs = "\n".join(err.value.errors)
    assert "dt" in msgs and "width" in msgs and "n_x" in msgs


def test_sections_and_overrides():
    text = """
kind=KLEIN_BARRIER
name=myrun
D=0.005
[grid]
n_x=256
n_p=128
[potential]
height=8
"""
    cfg = parse_text(text)
    assert cfg.name == "myrun"
    assert cfg.n_x == 256 and cfg.n_p == 128
    assert cfg.height == 8.0
    assert cfg.center == 4.0          # barrier default kept
    assert cfg.x0 == -10.0
    assert cfg.t_end == 24.0


def test_bad_value_and_duplicate():
    with pytest.raises(ConfigError) as err:
        parse_text("kind=CAT_FREE\ndt=abc\ndt=0.01\n")
    msgs = "\n".join(err.value.errors)
    assert "bad value" in msgs


def test_comments_and_blank_lines():
    cfg = parse_text("# comment\n\nkind=MAJORANA_FREE\n; another\np1=3\n")
    assert cfg.kind is ScenarioKind.MAJORANA_FREE
    assert cfg.p1 == 3.0
    assert cfg.state is StateKind.MAJORANA
    assert cfg.mass_quadratic == 0.0


def test_mass_modulation_default():
    cfg = parse_text("kind=MAJORANA_MASS\n")
    assert cfg.mass_quadratic == 0.05
    assert cfg.t_end == 14.0


def test_override_validates():
    cfg = parse_text("kind=CAT_FREE\n")
    out = override(cfg, n_x=256, D=0.005)
    assert out.n_x == 256 and out.D == 0.005
    with pytest.raises(ConfigError):
        override(cfg, n_x=100)
    with pytest.raises(ConfigError):
        override(cfg, nonsense=1)


def test_to_text_round_trips():
    cfg = apply_defaults(ScenarioConfig(kind=ScenarioKind.KLEIN_BARRIER))
    again = parse_text(to_text(cfg))
    assert again == cfg


def test_custom_defaults_to_free():
    cfg = parse_text("kind=CUSTOM\n")
    assert cfg.pot_kind is PotentialKind.NONE
    cfg = parse_text("kind=CUSTOM\n[potential]\nkind=barrier\nheight=3\n")
    assert cfg.pot_kind is PotentialKind.BARRIER
    assert cfg.height == 3.0
