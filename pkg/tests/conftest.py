"""Shared fixtures: reduced scenarios at test resolution"""

import os

import hypothesis
import numpy as np
import pytest

from crawlgait.core.models import reduce_model
from crawlgait.core.solver import SolverConfig
from crawlgait.data.scenarios import build_scenario


np.seterr(all="warn")

hypothesis.settings.register_profile(
    "fast", max_examples=50, deadline=None,
    suppress_health_check=[hypothesis.HealthCheck.function_scoped_fixture],
)
hypothesis.settings.register_profile(
    "ci", max_examples=200, deadline=None,
    suppress_health_check=[hypothesis.HealthCheck.function_scoped_fixture],
)

hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "fast"))


@pytest.fixture(scope="session")
def scenario_dyn():
    """reduce_model(build_scenario(name)), memoised per name and overrides"""
    cache = {}

    def get(name, **overrides):
        key = (name, tuple(sorted(overrides.items())))
        if key not in cache:
            cache[key] = reduce_model(build_scenario(name, overrides))
        return cache[key]

    return get


@pytest.fixture
def coarse():
    return SolverConfig(steps_per_period=256)


@pytest.fixture
def fine():
    return SolverConfig(steps_per_period=4096)


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    """Keep settings, logs and outputs inside the test's tmp dir"""
    monkeypatch.setenv("CRAWLGAIT_DATA_DIR", str(tmp_path / "data"))
    monkeypatch.setenv("CRAWLGAIT_OUTPUT_DIR", str(tmp_path / "out"))
    for name in ("CRAWLGAIT_STEPS_PER_PERIOD", "CRAWLGAIT_RESOLVENT_TOL",
                 "CRAWLGAIT_WORKERS", "CRAWLGAIT_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)
