import json

import numpy as np
import pytest

from stripsdm import cli, config, specfun
from stripsdm.errors import ConfigError

TINY = {
    "scenario": {"h": 0.05, "a": 1.0, "y0": 0.2, "z0": 0.5, "axes": ["z"]},
    "solver": {"m_max": 0, "samples_per_period": 2, "kx_max": 40},
    "output": {"x": {"start": 0, "stop": 2, "num": 5}},
}


@pytest.fixture
def tiny(tmp_path):
    path = tmp_path / "tiny.cfg"
    path.write_text(json.dumps(TINY))
    return path


def read(path):
    return path.read_bytes()


def test_bundled_configs_load():
    for name in config.BUNDLED:
        cfg = config.load_config(bundled=name)
        assert cfg["scenario"]["z0"] != cfg["scenario"]["a"]


def test_override_parsing():
    cfg = config.load_config(bundled="wide_strip", overrides=["solver.m_max=2",
                                                              "scenario.axes=[\"y\"]"])
    assert cfg["solver"]["m_max"] == 2
    assert cfg["scenario"]["axes"] == ["y"]
    with pytest.raises(ConfigError):
        config.load_config(bundled="wide_strip", overrides=["solver.m_max"])
    with pytest.raises(ConfigError):
        config.load_config(bundled="wide_strip", overrides=["nosuch.key=1"])


@pytest.mark.parametrize("bad", [
    {"scenario": {"z0": 1.0}},
    {"scenario": {"axes": ["w"]}},
    {"solver": {"m_max": -1}},
    {"medium": {"loss_tangent": 0.0}},
    {"solver": {"bogus": 1}},
])
def test_invalid_config_exit_code(tmp_path, bad, capsys):
    cfg = json.loads(json.dumps(TINY))
    for section, vals in bad.items():
        cfg.setdefault(section, {}).update(vals)
    path = tmp_path / "bad.cfg"
    path.write_text(json.dumps(cfg))
    assert cli.main(["fullwave", "--config", str(path), "--out", str(tmp_path)]) == cli.EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert cli.main(["fullwave", "--config", str(tmp_path / "nope.cfg")]) == cli.EXIT_CONFIG


def test_config_hash_changes_with_content():
    a = config.load_config(bundled="tem_a1")
    b = config.load_config(bundled="tem_a1", overrides=["solver.rel_tol=1e-9"])
    assert config.config_hash(a) == config.config_hash(config.load_config(bundled="tem_a1"))
    assert config.config_hash(a) != config.config_hash(b)


def test_selftest_passes(capsys):
    assert cli.main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") == len(cli.run_selftest.__globals__["CHECKS"])


def test_selftest_detects_corrupted_constant(monkeypatch):
    monkeypatch.setattr(specfun, "J0_SQUARED_TAIL", specfun.J0_SQUARED_TAIL + 1e-6)
    assert cli.main(["selftest"]) == cli.EXIT_SELFTEST


def test_tem_compare_is_deterministic(tiny, tmp_path):
    out1, out2, out3 = (tmp_path / n for n in ("a", "b", "c"))
    for out in (out1, out2):
        assert cli.main(["tem-compare", "--config", str(tiny), "--out", str(out)]) == 0
    assert cli.main(["tem-compare", "--config", str(tiny), "--out", str(out3),
                     "--threads", "2"]) == 0
    names = sorted(p.name for p in out1.iterdir())
    assert names == ["I_diff_z.csv", "I_strip_z.csv", "I_tem_z.csv", "manifest.txt"]
    for name in names:
        assert read(out1 / name) == read(out2 / name)
        if name != "manifest.txt":
            assert read(out1 / name) == read(out3 / name)
    head = (out1 / "I_strip_z.csv").read_text().splitlines()
    cfg = config.load_config(str(tiny))
    assert head[0] == f"# config_hash={config.config_hash(cfg)} quantity=I_strip_z"
    assert head[1] == "x,y,re,im,abs,arg"
    assert len(head) == 2 + 5


def test_tem_ratio_window():
    x = np.linspace(0, 30, 31)
    i = np.exp(-1j * x)
    assert cli.tem_ratio(x, i, i) == 0.0
    assert cli.tem_ratio(x, i, 0 * i) == pytest.approx(1.0)
    assert np.isnan(cli.tem_ratio(np.linspace(0, 2, 5), i[:5], i[:5]))
