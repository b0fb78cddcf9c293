"""Finite-volume solver for stochastic scalar conservation laws on the periodic torus."""

from ._core import (
    BlowupError,
    CflError,
    ConfigError,
    Scheme,
    canonical_config,
    config_hash,
    converge,
    couple,
    diagnose,
    godunov,
    mc,
    riemann_solution,
    run,
    validate_flux,
)

__all__ = [
    "BlowupError",
    "CflError",
    "ConfigError",
    "Scheme",
    "canonical_config",
    "config_hash",
    "converge",
    "couple",
    "diagnose",
    "godunov",
    "mc",
    "riemann_solution",
    "run",
    "validate_flux",
]
