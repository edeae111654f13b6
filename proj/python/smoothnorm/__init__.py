"""Smooth approximating norms built from boundary decompositions."""

import json

from ._smoothnorm import (
    ConfigError,
    ConstructionError,
    Error,
    ModelSpace,
    NumericError,
    OrliczFunction,
    ParameterError,
    PhiNorm,
    PreconditionError,
    build_renorm,
    epsilon_n,
    find_norming_support,
    injective_norm,
    make_orlicz,
    orlicz_norm,
    power_norm,
    psi_from_indices,
    run_config,
)


def run(config, suites=(), seed=None):
    """Run suites for a config given as a dict or JSON text; returns the parsed report."""
    text = config if isinstance(config, str) else json.dumps(config)
    return json.loads(run_config(text, list(suites), seed))


__all__ = [
    "ConfigError",
    "ConstructionError",
    "Error",
    "ModelSpace",
    "NumericError",
    "OrliczFunction",
    "ParameterError",
    "PhiNorm",
    "PreconditionError",
    "build_renorm",
    "epsilon_n",
    "find_norming_support",
    "injective_norm",
    "make_orlicz",
    "orlicz_norm",
    "power_norm",
    "psi_from_indices",
    "run",
    "run_config",
]
