# tests/test_config.py
from pathlib import Path

import pytest

from walkpool.core.config import Settings
from walkpool.core.errors import ConfigError, ParseError
from walkpool.schemas import HeuristicParams, TrainConfig, build_heuristic_params, load_config
from walkpool.utils.keyvalue import read_key_values, write_key_values

from .conftest import write_lines


def test_defaults_reproduce_the_reference_setup():
    cfg = TrainConfig()
    assert (cfg.k_hops, cfg.tau_c, cfg.heads) == (2, 7, 2)
    assert (cfg.lr, cfg.batch_size, cfg.epochs) == (5e-5, 32, 50)
    assert cfg.init_mode == "ones" and cfg.select == "best_val"
    assert cfg.included_groups == ("omega", "node", "link", "graph")


def test_key_value_file_with_overrides(tmp_path):
    path = tmp_path / "run.cfg"
    write_lines(path, [
        "# walkpool run",
        "tau_c = 5",
        "exclude = link, omega",
        "classifier_ratios=10,5,1",
        "lr=0.001  # faster",
    ])
    cfg = load_config(path, lr=None, epochs=3)
    assert cfg.tau_c == 5
    assert cfg.exclude == ("omega", "link")
    assert cfg.included_groups == ("node", "graph")
    assert cfg.classifier_ratios == (10, 5, 1)
    assert cfg.lr == 0.001
    assert cfg.epochs == 3


def test_unknown_keys_are_named(tmp_path):
    path = tmp_path / "bad.cfg"
    write_lines(path, ["tau=5", "heads=2", "lr_decay=0.1"])
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert info.value.keys == ["lr_decay", "tau"]
    assert str(path) in str(info.value)


@pytest.mark.parametrize("values", [
    {"exclude": "omega,node,link,graph"},
    {"init_mode": "dl", "init_dim": 3},
    {"tau_c": 1},
    {"classifier_ratios": "10,0"},
    {"select": "best"},
])
def test_invalid_values(values):
    with pytest.raises(ConfigError):
        TrainConfig().with_overrides(**values)


def test_key_value_syntax_errors(tmp_path):
    path = tmp_path / "broken.cfg"
    write_lines(path, ["heads=2", "no equals sign"])
    with pytest.raises(ParseError) as info:
        read_key_values(path)
    assert info.value.line_no == 2

    write_lines(path, ["heads=2", "heads=3"])
    with pytest.raises(ParseError, match="duplicate"):
        read_key_values(path)


def test_write_then_read_key_values(tmp_path):
    path = tmp_path / "out.cfg"
    write_key_values(path, {"tau_c": 4, "heads": 1})
    assert path.read_text() == "heads=1\ntau_c=4\n"
    assert load_config(path).tau_c == 4


def test_heuristic_params():
    params = build_heuristic_params({"beta": 0.01, "l_max": None})
    assert params == HeuristicParams(beta=0.01)
    with pytest.raises(ConfigError, match="alpha"):
        build_heuristic_params({"alpha": 1.5})


def test_settings_read_the_environment(monkeypatch):
    monkeypatch.setenv("WALKPOOL_LOG_LEVEL", "debug")
    monkeypatch.setenv("WALKPOOL_WORKERS", "3")
    settings = Settings()
    assert settings.LOG_LEVEL == "DEBUG"
    assert settings.WORKERS == 3


def test_every_setting_is_documented_in_env_example():
    example = Path(__file__).resolve().parents[1] / ".env.example"
    documented = {
        line.split("=", 1)[0].removeprefix("WALKPOOL_")
        for line in example.read_text(encoding="utf-8").splitlines()
        if line and not line.startswith("#")
    }
    assert set(Settings.model_fields) == documented
