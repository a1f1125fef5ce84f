"""Device parameters and the flat ``key = value`` config format.

A config file holds one assignment per line, SI units, ``#`` comments::

    # model device
    R = 6.0
    L = 0.8e-9
    Ip = 30e-9

Keys are the :class:`DeviceParams` field names plus ``preset`` (base values
to start from), ``backgroundPower`` (W) and ``calibrationBreak`` (K).
Missing keys take the preset values; unknown keys are an error.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace, asdict
import math
from pathlib import Path

from .errors import ConfigError, ParameterError


@dataclass(frozen=True)
class DeviceParams:
    """Circuit constants of the qubit / two-resonator / two-reservoir device."""

    R: float = 6.0
    L: float = 0.8e-9
    M: float = 0.8e-9
    Ip: float = 30e-9
    fq0: float = 2.0e9
    fr1: float = 7.0e9
    fr2: float = 7.0e9
    g1: float = 0.2e9
    g2: float = 0.2e9
    gamma12: float = 0.0
    Zinf: float = 50.0
    sigmaV1: float = 9.35e-10
    sigmaV2: float = 11.44e-10
    nExp: int = 5

    def __post_init__(self):
        for name in ("R", "L", "M", "Ip", "fq0", "fr1", "fr2", "Zinf", "sigmaV1", "sigmaV2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be finite and > 0, got {value!r}")
        for name in ("g1", "g2", "gamma12"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")
        if int(self.nExp) != self.nExp or self.nExp < 3:
            raise ParameterError(f"nExp must be an integer >= 3, got {self.nExp!r}")
        if self.M > self.L * (1 + 1e-12):
            raise ParameterError(f"M ({self.M}) must not exceed L ({self.L})")

    @property
    def symmetric(self) -> bool:
        return self.fr1 == self.fr2 and self.g1 == self.g2

    def with_(self, **changes) -> "DeviceParams":
        return replace(self, **changes)


# Model values used to draw the theory curves.
DEFAULT_DEVICE = DeviceParams()
# Spectroscopy replica: smaller persistent current, otherwise unchanged.
SPECTROSCOPY_DEVICE = DeviceParams(Ip=21e-9)

PRESETS = {"model": DEFAULT_DEVICE, "spectroscopy": SPECTROSCOPY_DEVICE}


@dataclass(frozen=True)
class Config:
    params: DeviceParams = field(default_factory=DeviceParams)
    preset: str = "model"
    backgroundPower: float = 0.0
    calibrationBreak: float = 0.135


_PARAM_KEYS = {f.name for f in fields(DeviceParams)}
_EXTRA_KEYS = {"preset", "backgroundPower", "calibrationBreak"}


def _parse_number(key, text):
    try:
        if key == "nExp":
            value = float(text)
            if value != int(value):
                raise ValueError
            return int(value)
        value = float(text)
    except ValueError:
        raise ConfigError(f"{key}: not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{key}: must be finite")
    return value


def parse_config(text: str) -> Config:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = (s.strip() for s in line.partition("="))
        if key not in _PARAM_KEYS | _EXTRA_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        values[key] = value

    preset = values.pop("preset", "model")
    if preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    extras = {k: _parse_number(k, values.pop(k)) for k in list(values) if k in _EXTRA_KEYS}
    changes = {k: _parse_number(k, v) for k, v in values.items()}
    try:
        params = replace(PRESETS[preset], **changes)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    if extras.get("backgroundPower", 0.0) < 0:
        raise ConfigError("backgroundPower must be >= 0")
    if not 0 < extras.get("calibrationBreak", 0.135):
        raise ConfigError("calibrationBreak must be > 0")
    return Config(params=params, preset=preset, **extras)


def load_config(path) -> Config:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def format_config(cfg: Config) -> str:
    lines = [f"preset = {cfg.preset}"]
    for key, value in asdict(cfg.params).items():
        lines.append(f"{key} = {value!r}")
    lines.append(f"backgroundPower = {cfg.backgroundPower!r}")
    lines.append(f"calibrationBreak = {cfg.calibrationBreak!r}")
    return "\n".join(lines) + "\n"
