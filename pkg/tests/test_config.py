import pytest

from pmhd.config import ConfigParseError, RunConfig, default_config, load_config, parse_config
from pmhd.engine import Pattern


def test_example_overrides():
    cfg = parse_config("nx1 = 64\npolicy = flat1d")
    assert cfg.nx1 == 64 and Pattern.parse(cfg.policy) is Pattern.FLAT1D
    assert cfg.loop_policy().pattern is Pattern.FLAT1D


def test_empty_is_defaults(monkeypatch):
    monkeypatch.delenv("PMHD_WORKERS", raising=False)
    cfg = parse_config("")
    assert cfg == RunConfig()
    mc = cfg.mesh_config()
    assert mc.nx == (16, 16, 16) and mc.mb == (16, 16, 16)
    pol = cfg.loop_policy()
    assert pol.pattern is Pattern.SIMD_NESTED and pol.workers == 1


def test_bad_value_line_number():
    with pytest.raises(ConfigParseError) as info:
        parse_config("nx1 = banana")
    assert info.value.line == 1


@pytest.mark.parametrize("text,line", [
    ("nx1 = 8\n\n# note\nbogus = 3\n", 4),
    ("nx1 = 8\njust words\n", 2),
    ("cfl = 0.3\npolicy = spiral\n", 2),
    ("nx1 = 8\nworkers = 0\n", 2),
    ("riemann = roe\nriemann = hlld\n", 2),
    ("bench_sizes = 8, x\n", 1),
])
def test_errors_carry_line(text, line):
    with pytest.raises(ConfigParseError) as info:
        parse_config(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_later_keys_win_and_comments():
    cfg = parse_config("nx1 = 8   # first\nnx1 = 32\ncfl = 0.4\nscale_workers = 1, 2, 8\n")
    assert cfg.nx1 == 32 and cfg.cfl == 0.4 and cfg.scale_workers == (1, 2, 8)


def test_env_worker_override(monkeypatch):
    monkeypatch.setenv("PMHD_WORKERS", "3")
    assert default_config().workers == 3
    assert parse_config("workers = 2").workers == 2
    monkeypatch.setenv("PMHD_WORKERS", "many")
    with pytest.raises(ConfigParseError):
        default_config()


def test_derived_objects(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("nx1 = 32\nmb1 = 16\nwave_n2 = 1\nriemann = hlle\nemf = arithmetic\n")
    cfg = load_config(path)
    assert cfg.mesh_config().mb == (16, 16, 16)
    assert cfg.wave_setup().wavevector == (1, 1, 0)
    assert cfg.solver_options().riemann == "hlle"
