"""Flat key=value configuration documents shared by the CLI and library.

One file describes one scenario.  Lines are ``key = value`` with ``#``
comments; CLI flags override file keys.  The sampling period is always
derived as 1/(baud * samples_per_symbol) so tap formulas and the link
stay consistent.
"""

from __future__ import annotations

import os

from .cd_model import LIGHT_SPEED, SystemParams, max_taps
from .link_sim import LinkConfig

ENV_DEFAULT_CONFIG = "DISPERSE_DEFAULT_CONFIG"

REQUIRED_SYSTEM_KEYS = (
    "dispersion_ps_nm_km",
    "wavelength_nm",
    "fiber_length_km",
    "baud",
    "samples_per_symbol",
)


class ConfigError(ValueError):
    """Malformed or incomplete configuration; message names the key/line."""


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines with # comments into a string dict."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key, value = key.strip(), value.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def load_config(path: str | None) -> dict:
    """Read a config file; falls back to $DISPERSE_DEFAULT_CONFIG."""
    if path is None:
        path = os.environ.get(ENV_DEFAULT_CONFIG)
    if path is None:
        raise ConfigError(
            f"no config file given and {ENV_DEFAULT_CONFIG} is not set"
        )
    try:
        with open(path) as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc


def _require(cfg: dict, key: str) -> str:
    if key not in cfg:
        raise ConfigError(f"missing required config key {key!r}")
    return cfg[key]


def _get_float(cfg: dict, key: str, default=None) -> float:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required config key {key!r}")
        return default
    try:
        return float(cfg[key])
    except ValueError as exc:
        raise ConfigError(f"config key {key!r}: not a number: {cfg[key]!r}") from exc


def _get_int(cfg: dict, key: str, default=None) -> int:
    value = _get_float(cfg, key, default)
    if value != int(value):
        raise ConfigError(f"config key {key!r}: expected an integer, got {value}")
    return int(value)


def system_from_config(cfg: dict) -> SystemParams:
    """Build SystemParams from engineering-unit keys."""
    for key in REQUIRED_SYSTEM_KEYS:
        _require(cfg, key)
    return SystemParams.from_engineering(
        dispersion_ps_nm_km=_get_float(cfg, "dispersion_ps_nm_km"),
        wavelength_nm=_get_float(cfg, "wavelength_nm"),
        fiber_length_km=_get_float(cfg, "fiber_length_km"),
        baud=_get_float(cfg, "baud"),
        samples_per_symbol=_get_int(cfg, "samples_per_symbol"),
        light_speed=_get_float(cfg, "light_speed", LIGHT_SPEED),
    )


def link_from_config(cfg: dict) -> LinkConfig:
    system = system_from_config(cfg)
    return LinkConfig(
        system=system,
        snr_db=_get_float(cfg, "snr_db"),
        baud=_get_float(cfg, "baud"),
        samples_per_symbol=_get_int(cfg, "samples_per_symbol"),
        modulation=cfg.get("modulation", "16QAM"),
        rolloff=_get_float(cfg, "rolloff", 0.1),
        rrc_span_symbols=_get_int(cfg, "rrc_span_symbols", 64),
        n_symbols=_get_int(cfg, "n_symbols", 100_000),
        seed=_get_int(cfg, "seed", 0),
    )


def engine_settings(cfg: dict, system: SystemParams) -> dict:
    """Engine-specific keys with defaults resolved against the system."""
    return {
        "engine": cfg.get("engine", "direct"),
        "n_taps": _get_int(cfg, "n_taps", max_taps(system)),
        "n_clusters": _get_int(cfg, "n_clusters", 12),
        "eta": _get_float(cfg, "eta", 0.8),
        "alpha": _get_float(cfg, "alpha", 0.7),
        "fft_size": _get_int(cfg, "fft_size", 512),
        "fd_mode": cfg.get("fd_mode", "analytic"),
        "cluster_seed": _get_int(cfg, "cluster_seed", 12345),
    }
