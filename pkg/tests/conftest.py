"""Shared fixtures for the test suite."""

import json

import numpy as np
import pytest

from src.allocation.environment import AllocationEnv, GridConfig, RewardConfig
from src.geometry.polygon import ConvexPolygon
from src.montecarlo.capture_table import CaptureTimeTable
from src.td3.agent import Td3Config


@pytest.fixture(autouse=True)
def quiet_environment(monkeypatch):
    """No log file and a single worker process for every test."""
    monkeypatch.setenv("LOG_FILE", "")
    monkeypatch.setenv("LOG_LEVEL", "WARNING")
    monkeypatch.setenv("SWARM_PE_THREADS", "1")


@pytest.fixture
def arena():
    """The 10 x 10 square arena."""
    return ConvexPolygon.box(0.0, 0.0, 10.0, 10.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def reference_table():
    return CaptureTimeTable.reference()


@pytest.fixture
def small_td3_config():
    """TD3 settings small enough for unit tests."""
    return Td3Config(
        hidden_sizes=(8, 8),
        batch_size=4,
        buffer_size=1000,
        warmup_steps=5,
        episodes=3,
        eval_episodes=2,
    )


@pytest.fixture
def allocation_env(reference_table):
    return AllocationEnv(
        grid=GridConfig(n=3, k_max=8),
        reward=RewardConfig(c_distribution=1.0, c_capture=0.0),
        table=reference_table,
    )


@pytest.fixture
def write_config(tmp_path):
    """Write a JSON run configuration and return its path."""
    def _write(document, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path
    return _write
