"""Deterministic text outputs: run manifest headers, CSV tables, peak summary."""
from __future__ import annotations

from dataclasses import dataclass, asdict
from datetime import datetime, timezone
import os
from pathlib import Path

from . import __version__
from .params import DeviceParams

SWEEP_HEADER = "flux_frac,f_q_hz,rho0,rho1,rho2,rho3,power_w,t2_k"
SPECTRUM_HEADER = "flux_frac,f_q_hz,e0_hz,e1_hz,e2_hz,e3_hz"


def fmt(x) -> str:
    """Shortest round-trip decimal form of a float."""
    return repr(float(x))


def input_timestamp(config_path) -> str:
    """Timestamp of the run inputs, stable across reruns.

    ``SOURCE_DATE_EPOCH`` wins when set; otherwise the config file's
    modification time; with no config file, ``none``.
    """
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is None and config_path is not None:
        epoch = Path(config_path).stat().st_mtime
    if epoch is None:
        return "none"
    return datetime.fromtimestamp(float(epoch), tz=timezone.utc).isoformat()


@dataclass(frozen=True)
class RunManifest:
    config_path: str | None
    subcommand: str
    params: DeviceParams
    outputs: tuple = ()
    version: str = __version__
    timestamp: str = "none"
    settings: tuple = ()  # (name, value) pairs of run options

    def header_lines(self):
        lines = [
            f"fluxheat {self.version}",
            f"subcommand: {self.subcommand}",
            f"config: {self.config_path if self.config_path else '(defaults)'}",
            f"timestamp: {self.timestamp}",
        ]
        lines += [f"output: {p}" for p in self.outputs]
        lines += [f"{k}: {v}" for k, v in self.settings]
        lines += [f"param {k} = {v!r}" for k, v in asdict(self.params).items()]
        return ["# " + line for line in lines]


def sweep_csv(result, manifest: RunManifest | None = None) -> str:
    lines = manifest.header_lines() if manifest else []
    lines.append(SWEEP_HEADER)
    for r in result.records:
        cells = [r.fluxFrac, r.f_q, *r.rho, r.power, r.T2]
        lines.append(",".join(fmt(c) for c in cells))
    return "\n".join(lines) + "\n"


def read_sweep_csv(text: str):
    rows = []
    for line in text.splitlines():
        if not line or line.startswith("#") or line == SWEEP_HEADER:
            continue
        rows.append([float(c) for c in line.split(",")])
    return rows


def peak_summary(result, manifest: RunManifest | None = None) -> str:
    lines = manifest.header_lines() if manifest else []
    peaks = result.peaks.peaks
    lines.append(f"peaks: {len(peaks)}")
    lines.append("kind,flux_frac,power_w,prominence_w")
    for p in peaks:
        lines.append(f"{p.kind},{fmt(p.fluxFrac)},{fmt(p.height)},{fmt(p.prominence)}")
    return "\n".join(lines) + "\n"


def spectrum_csv(rows, manifest: RunManifest | None = None) -> str:
    lines = manifest.header_lines() if manifest else []
    lines.append(SPECTRUM_HEADER)
    for row in rows:
        lines.append(",".join(fmt(c) for c in row))
    return "\n".join(lines) + "\n"
