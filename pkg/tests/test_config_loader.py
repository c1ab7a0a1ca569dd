# --- tests/test_config_loader.py ---
import os

import pytest

import config_loader
from conftest import ROOT

ENV_VARS = (config_loader.HORIZON_ENV_VAR, config_loader.SEED_ENV_VAR, "LOG_LEVEL")


@pytest.fixture
def clean_env(monkeypatch):
    # load_dotenv pisze do os.environ; setenv gwarantuje przywrócenie po teście
    for name in ENV_VARS:
        monkeypatch.setenv(name, "")
    return monkeypatch


def write_ini(tmp_path, text):
    path = tmp_path / "config.ini"
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_missing_file_gives_code_defaults(tmp_path):
    config = config_loader.load_config(str(tmp_path / "missing.ini"))
    assert config == {
        "log_level": "INFO", "log_to_file": False, "log_file_name": "levi_verifier.log",
        "horizon": 128, "catalog_seed": 20240917, "random_catalog_entries": 10,
        "recheck_samples": 256, "pair_search_limit": 64, "default_format": "text", "report_file": "",
    }


def test_shipped_config_matches_defaults():
    config = config_loader.load_config(os.path.join(ROOT, "config.ini"))
    assert config["horizon"] == 128
    assert config["default_format"] == "text"
    assert config["report_file"] == ""


def test_values_are_typed_and_unquoted(tmp_path):
    path = write_ini(tmp_path, "[DEFAULT]\nlog_to_file = yes\nlog_file_name = \"run.log\"\n"
                               "[Verification]\nhorizon = 32\nrandom_catalog_entries = 0\n"
                               "[Report]\ndefault_format = structured  # JSON lines\n")
    config = config_loader.load_config(path)
    assert config["log_to_file"] is True
    assert config["log_file_name"] == "run.log"
    assert config["horizon"] == 32
    assert config["random_catalog_entries"] == 0
    assert config["default_format"] == "structured"


@pytest.mark.parametrize("section, line, key, expected", [
    ("Verification", "horizon = abc", "horizon", 128),
    ("Verification", "horizon = 0", "horizon", 128),
    ("Verification", "pair_search_limit = -3", "pair_search_limit", 64),
    ("Verification", "random_catalog_entries = -1", "random_catalog_entries", 10),
    ("Report", "default_format = xml", "default_format", "text"),
    ("DEFAULT", "log_to_file = maybe", "log_to_file", False),
])
def test_invalid_values_fall_back_to_defaults(tmp_path, section, line, key, expected):
    config = config_loader.load_config(write_ini(tmp_path, f"[{section}]\n{line}\n"))
    assert config[key] == expected


def test_environment_overrides(tmp_path, clean_env):
    clean_env.setenv(config_loader.HORIZON_ENV_VAR, "16")
    clean_env.setenv(config_loader.SEED_ENV_VAR, "5")
    clean_env.setenv("LOG_LEVEL", "debug")
    config = config_loader.get_env_config(str(tmp_path / "none.env"), str(tmp_path / "none.ini"))
    assert (config["horizon"], config["catalog_seed"], config["log_level"]) == (16, 5, "DEBUG")


def test_bad_seed_keeps_ini_value(tmp_path, clean_env):
    clean_env.setenv(config_loader.SEED_ENV_VAR, "x")
    config = config_loader.get_env_config(str(tmp_path / "none.env"), str(tmp_path / "none.ini"))
    assert config["catalog_seed"] == 20240917


@pytest.mark.parametrize("raw", ["abc", "0", "-4"])
def test_bad_horizon_from_environment_is_fatal(tmp_path, clean_env, raw):
    clean_env.setenv(config_loader.HORIZON_ENV_VAR, raw)
    with pytest.raises(ValueError):
        config_loader.get_env_config(str(tmp_path / "none.env"), str(tmp_path / "none.ini"))


def test_dotenv_file_is_read(tmp_path, clean_env):
    env_file = tmp_path / ".env"
    env_file.write_text("LEVI_HORIZON=7\n", encoding="utf-8")
    config = config_loader.get_env_config(str(env_file), str(tmp_path / "none.ini"))
    assert config["horizon"] == 7
