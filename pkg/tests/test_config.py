#!/usr/bin/env python3
"""
Configuration defaults and environment overrides
"""
import importlib

import pytest


def test_config_import():
    """Test that all required config values can be imported"""
    try:
        from src.config import (
            THREADS,
            OUTPUT_DIR,
            EPSILON_M,
            EPSILON_N,
            EPSILON_3,
            MAX_INNER_ITERATIONS,
            MAX_OUTER_ITERATIONS,
            ORACLE_MAX_NODES,
        )
        assert THREADS >= 1
        assert OUTPUT_DIR
        assert 0 < EPSILON_3 <= EPSILON_M
        assert EPSILON_N > 0
        assert MAX_INNER_ITERATIONS > 0 and MAX_OUTER_ITERATIONS > 0
        assert ORACLE_MAX_NODES == 20
    except ImportError as e:
        pytest.fail(f"Failed to import config values: {e}")


def test_penalty_schedule_constants():
    from src import config
    assert config.SIGMA_1 > 1
    assert 0 < config.SIGMA_2 < 1
    assert config.GAMMA_LARGE > config.GAMMA_SMALL > 0


def test_environment_overrides(monkeypatch):
    """RIDESHARE_* variables are read at import time"""
    from src import config
    monkeypatch.setenv("RIDESHARE_THREADS", "4")
    monkeypatch.setenv("RIDESHARE_EPSILON_M", "0.05")
    monkeypatch.setenv("RIDESHARE_DEBUG", "yes")
    try:
        reloaded = importlib.reload(config)
        assert reloaded.THREADS == 4
        assert reloaded.EPSILON_M == 0.05
        assert reloaded.DEBUG is True
    finally:
        monkeypatch.undo()
        importlib.reload(config)
