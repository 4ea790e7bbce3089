"""Volume densities, area and coarea jacobians, and anisotropic surface geometry."""

import json
import os

from ._core import *  # noqa: F401,F403
from ._core import ConfigError, Error, run_scenarios, scenario_names


def _config_text(config):
    if isinstance(config, dict):
        return json.dumps(config)
    if os.path.exists(str(config)):
        with open(config, encoding="utf-8") as f:
            return f.read()
    return str(config)


def run_suite(config, seed=None, filter=""):
    """Runs a scenario config (a path, JSON text or dict) and returns the reports as dicts."""
    return [json.loads(r) for r in run_scenarios(_config_text(config), seed, filter)]


def scenarios(config):
    return scenario_names(_config_text(config))


__all__ = [name for name in dir() if not name.startswith("_")]
