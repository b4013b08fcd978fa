"""Runtime configuration with documented defaults.

Every field can be overridden by a CLI flag or a CLASSCODE_* environment
variable (e.g. CLASSCODE_REPAIR_HAIRLINES=1, CLASSCODE_PORT=9000).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields

ENV_PREFIX = "CLASSCODE_"


@dataclass
class DetectorConfig:
    # candidate scanline run-ratio tolerances
    ratio_lo: float = 0.3
    ratio_hi: float = 0.9
    white_balance: float = 0.4
    merge_radius: float = 2.0
    # decode stage
    unit_spread: float = 0.25
    min_diameter: float = 24.0
    min_contrast: float = 30.0
    # preprocessing
    binarize_bias: float = 0.05
    repair_hairlines: bool = False


@dataclass
class TemporalConfig:
    run_fraction: float = 0.08
    run_min: int = 3
    run_cap: int = 10


@dataclass
class ServiceConfig:
    port: int = 8765
    host: str = "127.0.0.1"
    log_path: str = "classcode-answers.log"
    max_frame_bytes: int = 8 * 1024 * 1024
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    temporal: TemporalConfig = field(default_factory=TemporalConfig)


def _coerce(raw: str, kind: type):
    if kind is bool:
        return raw.strip().lower() in ("1", "true", "yes", "on")
    return kind(raw)


def _apply_env(cfg, environ) -> None:
    for f in fields(cfg):
        if f.type in ("DetectorConfig", "TemporalConfig"):
            continue
        raw = environ.get(ENV_PREFIX + f.name.upper())
        if raw is not None:
            setattr(cfg, f.name, _coerce(raw, type(getattr(cfg, f.name))))


def load_config(environ=None) -> ServiceConfig:
    """Build a ServiceConfig from defaults plus CLASSCODE_* variables."""
    environ = os.environ if environ is None else environ
    cfg = ServiceConfig()
    _apply_env(cfg, environ)
    _apply_env(cfg.detector, environ)
    _apply_env(cfg.temporal, environ)
    return cfg
