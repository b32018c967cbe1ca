"""
Tests for drinfeld.config: config file parsing and precedence.

Run:
    pytest tests/test_config.py -v
"""

import os
import sys

import pytest

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, REPO_ROOT)

from drinfeld.config import (
    RunConfig,
    build_config,
    load_config_file,
    parse_config_lines,
    resolve_config_path,
)
from drinfeld.errors import ConfigError


class TestParseConfigLines:
    def test_key_value_lines(self):
        values = parse_config_lines(["# comment", "", "p = 5", "t-order = 7", "threshold = 0.5"])
        assert values == {"p": 5, "t_order": 7, "threshold": 0.5}

    def test_unknown_key_skipped(self, caplog):
        values = parse_config_lines(["colour = blue", "prec = 40"])
        assert values == {"prec": 40}
        assert "unknown config key" in caplog.text

    def test_missing_equals(self):
        with pytest.raises(ConfigError):
            parse_config_lines(["prec 40"])

    def test_bad_value_names_line(self):
        with pytest.raises(ConfigError, match="<config>:2"):
            parse_config_lines(["p = 3", "prec = lots"])

    def test_out_may_be_empty(self):
        assert parse_config_lines(["out ="]) == {"out": None}


class TestBuildConfig:
    def test_defaults(self):
        cfg = build_config()
        assert cfg == RunConfig()
        assert cfg.field_params.q == 3

    def test_flags_override_file(self):
        cfg = build_config({"prec": 40, "seed": 2}, {"prec": 60, "seed": None})
        assert cfg.prec == 60
        assert cfg.seed == 2

    @pytest.mark.parametrize(
        "overrides",
        [{"prec": 0}, {"threshold": 1.5}, {"threshold": 0}, {"p": 1}, {"seed": -1}, {"threads": 0}],
    )
    def test_validation(self, overrides):
        with pytest.raises(ConfigError):
            build_config(overrides)

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            build_config({"colour": "blue"})

    def test_to_json_skips_run_only_fields(self):
        data = RunConfig(threads=4, out="x.json").to_json()
        assert "threads" not in data
        assert "out" not in data
        assert data["prec"] == 80


class TestConfigFile:
    def test_load(self, tmp_path):
        path = tmp_path / "config.txt"
        path.write_text("p = 2\nm = 1\n", encoding="utf-8")
        assert load_config_file(str(path)) == {"p": 2, "m": 1}

    def test_missing_file(self, tmp_path):
        assert load_config_file(str(tmp_path / "nope.txt")) == {}
        assert load_config_file(None) == {}

    def test_resolve_explicit_path(self, tmp_path, caplog):
        missing = tmp_path / "missing.txt"
        assert resolve_config_path(str(missing)) == str(missing)
        assert "Config file not found" in caplog.text

    def test_resolve_default(self, tmp_path, monkeypatch):
        monkeypatch.setattr("drinfeld.config.Path.home", lambda: tmp_path)
        assert resolve_config_path(None) is None
        folder = tmp_path / ".drinfeld-desk"
        folder.mkdir()
        (folder / "config.txt").write_text("prec = 30\n", encoding="utf-8")
        assert resolve_config_path(None) == str(folder / "config.txt")
