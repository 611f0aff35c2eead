"""Tests for logging, JSON helpers and environment settings."""

import logging

import pytest

import pyesdp as pe
from pyesdp.utils.settings import load_env_settings
from pyesdp.utils.utils import config_hash, load_and_sanitize


@pytest.fixture(autouse=True)
def _quiet_logging():
    yield
    pe.reset_logging()


def test_setup_logging_writes_file(tmp_path):
    log_file = tmp_path / "logs" / "run.log"
    pe.setup_logging(level="SUCCESS", log_file=log_file, include_colors=False)
    logger = pe.get_logger("pyesdp.tests")
    logger.info("hidden")
    logger.success("network saved")
    for handler in logging.getLogger("pyesdp").handlers:
        handler.flush()
    text = log_file.read_text(encoding="utf-8")
    assert "network saved" in text
    assert "hidden" not in text


def test_logger_names_live_under_package():
    assert pe.get_logger("sweep").name == "pyesdp.sweep"
    assert pe.get_logger("pyesdp.solver").name == "pyesdp.solver"
    assert pe.get_logger("__main__").name == "pyesdp.main"


def test_debug_mode_and_disable():
    pe.enable_debug_mode()
    assert logging.getLogger("pyesdp").level == logging.DEBUG
    pe.disable_logging()
    assert logging.getLogger("pyesdp").level > logging.CRITICAL


def test_read_json_missing_file(tmp_path):
    with pytest.raises(pe.PyEsdpFileNotFoundError):
        pe.read_json(tmp_path / "nothing.json")


def test_write_json_creates_folders(tmp_path):
    path = tmp_path / "a" / "b" / "data.json"
    pe.write_json({"x": 0.1 + 0.2}, path)
    assert pe.read_json(path) == {"x": 0.1 + 0.2}


def test_load_and_sanitize_reports_parse_errors(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "n": 40,\n  "m": \n}', encoding="utf-8")
    with pytest.raises(pe.ConfigurationError, match="bad.json"):
        load_and_sanitize(path)


def test_config_hash_is_order_independent():
    assert config_hash({"n": 40, "m": 5}) == config_hash({"m": 5, "n": 40})
    assert config_hash({"n": 40}) != config_hash({"n": 41})


def test_env_settings(monkeypatch):
    monkeypatch.setenv("PYESDP_TOLERANCE", "1e-8")
    monkeypatch.setenv("PYESDP_WORKERS", "3")
    env = load_env_settings()
    assert env["tolerance"] == 1e-8
    assert env["workers"] == 3

    settings = pe.SolveSettings.from_env(max_iterations=10)
    assert settings.tolerance == 1e-8
    assert settings.max_iterations == 10


def test_env_settings_bad_value(monkeypatch):
    monkeypatch.setenv("PYESDP_MAX_ITERATIONS", "lots")
    with pytest.raises(pe.ConfigurationError, match="PYESDP_MAX_ITERATIONS"):
        load_env_settings()


def test_env_settings_from_dotenv(tmp_path, monkeypatch):
    monkeypatch.delenv("PYESDP_WORKERS", raising=False)
    dotenv = tmp_path / ".env"
    dotenv.write_text("PYESDP_WORKERS=2\n", encoding="utf-8")
    try:
        assert load_env_settings(str(dotenv))["workers"] == 2
    finally:
        monkeypatch.delenv("PYESDP_WORKERS", raising=False)
