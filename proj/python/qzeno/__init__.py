"""Repeated position projections of a particle under quantum Brownian motion.

Configuration is a dict of dotted keys (``{"qbm.D": "4000", "run.eps": "0.005"}``);
values may be strings or numbers.
"""

from . import _qzeno
from ._qzeno import (
    ArgumentError,
    ConfigError,
    NumericalError,
    __version__,
    classical_mode,
    gaussian_overlap,
    recipes,
    spin_survival,
)

__all__ = [
    "ArgumentError",
    "ConfigError",
    "NumericalError",
    "__version__",
    "classical_mode",
    "config",
    "gaussian_overlap",
    "recipes",
    "run",
    "run_recipe",
    "spin_survival",
    "timescales",
    "validate",
]


def _kv(overrides):
    return {str(k): v if isinstance(v, str) else repr(v) for k, v in (overrides or {}).items()}


def config(overrides=None):
    """Full configuration (as strings) after applying overrides."""
    return _qzeno.config(_kv(overrides))


def run(overrides=None):
    """Run one projection sequence; returns survival, moments and the final density matrix."""
    return _qzeno.run(_kv(overrides))


def run_recipe(name, out_dir, overrides=None):
    """Run a named recipe into out_dir; returns the files written and the summary numbers."""
    return _qzeno.run_recipe(name, _kv(overrides), str(out_dir))


def timescales(overrides=None, p2=25.0):
    return _qzeno.timescales(_kv(overrides), float(p2))


def validate(overrides=None):
    """Fast invariant suite: list of (name, value, tolerance, passed)."""
    return _qzeno.validate(_kv(overrides))
