"""Shared fixtures. The full-window preset runs are the expensive part
of the suite, so they are simulated once per session and reused by the
behaviour, metrics, and acceptance tests."""

import pytest

from xtalksim.config import (apply_set_overrides, preset_config,
                             run_scenario)
from xtalksim.network import PRESET_NAMES


@pytest.fixture(scope="session")
def stock_runs():
    """name -> (ScenarioResult, WaveformSet, ResolvedScenario) for the
    three bundled presets at their default settings."""
    return {name: run_scenario(preset_config(name)) for name in PRESET_NAMES}


@pytest.fixture(scope="session")
def stock_runs_n24():
    """Same presets with n_segments doubled to 24."""
    out = {}
    for name in PRESET_NAMES:
        cfg = apply_set_overrides(preset_config(name), ["sim.n_segments=24"])
        out[name] = run_scenario(cfg)
    return out


@pytest.fixture(scope="session")
def tap1_run():
    """Shielded scenario with a single midpoint ground tap."""
    cfg = apply_set_overrides(preset_config("shield"),
                              ["scenario.tap_count=1"])
    return run_scenario(cfg)


@pytest.fixture(scope="session")
def halfdt_run():
    """The no-shield preset at half the stock timestep."""
    cfg = apply_set_overrides(preset_config("no-shield"), ["sim.dt=2.5e-11"])
    return run_scenario(cfg)
