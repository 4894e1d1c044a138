"""Non-stationary bandit simulations: PrudentBandits, SelectiveBandits,
environment generators and assumption checks.

Environments, traces and reports are plain dicts (the JSON documents used by
the command-line tool).
"""

import json

from . import _nsbandit
from ._nsbandit import ConfigError, ContractError, GenerationError, InputError, ModeError

__all__ = [
    "ConfigError",
    "ContractError",
    "GenerationError",
    "InputError",
    "ModeError",
    "derive_params",
    "generate_environment",
    "minimal_partition",
    "run_experiment",
    "run_prudent",
    "run_selective",
    "validate_environment",
]


def generate_environment(**request):
    """Generate a case a-d environment, e.g.
    ``generate_environment(case="a", K=2, T=100, M=1, gaps=[[0, 0.5]])``."""
    return json.loads(_nsbandit.generate_environment(json.dumps(request)))


def run_prudent(env, M=1, B_star=0.0, seed=0, scan_mode="geometric_grid"):
    return json.loads(_nsbandit.run_prudent(json.dumps(env), M, B_star, seed, scan_mode))


def run_selective(env, B_star=0.0, seed=0):
    return json.loads(_nsbandit.run_selective(json.dumps(env), B_star, seed))


def derive_params(case, **inputs):
    return json.loads(_nsbandit.derive_params(case, json.dumps(inputs)))


def validate_environment(env, B_star, change_points=()):
    """Check a partition (default: the whole horizon as one interval)."""
    return json.loads(_nsbandit.validate_environment(json.dumps(env), B_star, list(change_points)))


def minimal_partition(env, B_star):
    return json.loads(_nsbandit.minimal_partition(json.dumps(env), B_star))


def run_experiment(config, base_dir="."):
    return json.loads(_nsbandit.run_experiment(json.dumps(config), str(base_dir)))
