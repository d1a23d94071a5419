"""Ricci-mean curvature flow of closed curves in gradient shrinking solitons."""
import json as _json

from ._rmcf import (
    ConfigError,
    DomainError,
    Error,
    InputError,
    __version__,
    identity_residuals,
)
from . import _rmcf

__all__ = [
    "ConfigError",
    "DomainError",
    "Error",
    "InputError",
    "__version__",
    "check_identities",
    "echo_config",
    "identity_residuals",
    "run_scenario",
    "variation_test",
]

SERIES_COLUMNS = (
    "clock",
    "weighted_volume",
    "residual_integral",
    "stone",
    "type_one",
    "max_defect",
    "f_at_marked",
    "length",
)


def check_identities(soliton, samples=1000, seed=1):
    """Soliton and Ricci flow identity residuals at seeded random points."""
    return _json.loads(_rmcf.check_identities(soliton, samples, seed))


def run_scenario(config_path, out_dir, strict=False):
    """Run one scenario file, write its artifacts to out_dir and return a summary dict.

    The summary carries the termination, horizon, audit.json contents and the
    time series as one list per CSV column.
    """
    return _json.loads(_rmcf.run_scenario(str(config_path), str(out_dir), strict))


def echo_config(path):
    """Canonical text of a scenario file with every default spelled out."""
    return _rmcf.echo_config(str(path))


def variation_test(config_path, directions=20):
    return _json.loads(_rmcf.variation_test(str(config_path), directions))
