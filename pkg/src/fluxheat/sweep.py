"""Flux sweeps of the transport model, peak finding and switching curves."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
import math

import numpy as np
from scipy.signal import find_peaks as _scipy_find_peaks

from .dynamics import evaluate_point, power_to_reservoir2
from .errors import ConvergenceError, ParameterError
from .params import DeviceParams
from .spectrum import qubit_frequency, reduced_detuning
from .thermal import ep_power, invert_ep_power, switching_ratio

FIXED = "fixedT2"
SELF_CONSISTENT = "selfConsistentT2"


@dataclass(frozen=True)
class SweepConfig:
    fluxStart: float = 0.3
    fluxStop: float = 0.7
    points: int = 2001
    T1: float = 0.3
    T0: float = 0.08
    T2: float | None = None  # fixed mode only; defaults to T0
    mode: str = FIXED
    backgroundPower: float = 0.0
    damping: float = 0.5
    tolT: float = 1e-6
    tolPower: float = 1e-21
    maxIter: int = 100

    def __post_init__(self):
        if self.fluxStart > self.fluxStop:
            raise ParameterError("fluxStart must not exceed fluxStop")
        if self.fluxStart < self.fluxStop and self.points < 2:
            raise ParameterError("points must be >= 2")
        if self.mode not in (FIXED, SELF_CONSISTENT):
            raise ParameterError(f"unknown mode {self.mode!r}")
        for name in ("T1", "T0"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be > 0")
        if self.T2 is not None and not self.T2 > 0:
            raise ParameterError("T2 must be > 0")
        if not 0 < self.damping <= 1:
            raise ParameterError("damping must be in (0, 1]")

    def grid(self) -> np.ndarray:
        if self.fluxStart == self.fluxStop:
            return np.array([self.fluxStart])
        return np.linspace(self.fluxStart, self.fluxStop, self.points)

    @property
    def fixed_T2(self) -> float:
        return self.T0 if self.T2 is None else self.T2


@dataclass(frozen=True)
class SweepRecord:
    fluxFrac: float
    f_q: float
    rho: tuple
    power: float
    T2: float


@dataclass(frozen=True)
class Peak:
    fluxFrac: float
    height: float
    prominence: float
    kind: str  # "central", "inner", "outer"


@dataclass(frozen=True)
class PeakAnnotations:
    peaks: tuple = ()

    def of_kind(self, kind):
        return [p for p in self.peaks if p.kind == kind]

    @property
    def central(self):
        found = self.of_kind("central")
        return found[0] if found else None


@dataclass(frozen=True)
class SweepResult:
    config: SweepConfig
    records: tuple
    peaks: PeakAnnotations = field(default_factory=PeakAnnotations)

    @property
    def flux(self) -> np.ndarray:
        return np.array([r.fluxFrac for r in self.records])

    @property
    def power(self) -> np.ndarray:
        return np.array([r.power for r in self.records])

    @property
    def T2(self) -> np.ndarray:
        return np.array([r.T2 for r in self.records])


def solve_self_consistent_T2(params: DeviceParams, fluxFrac: float, cfg: SweepConfig):
    """Damped fixed point for the drain temperature where photonic plus
    background power balances electron-phonon cooling.

    Returns ``(T2, point_result)``.
    """
    sv, n, T0 = params.sigmaV2, params.nExp, cfg.T0
    T2 = T0
    for _ in range(cfg.maxIter):
        point = evaluate_point(params, fluxFrac, cfg.T1, T2)
        P = point.power + cfg.backgroundPower
        target = invert_ep_power(sv, n, P, T0)
        residual = ep_power(sv, n, T2, T0) - P
        if abs(target - T2) < cfg.tolT and abs(residual) < cfg.tolPower:
            return T2, point
        T2 += cfg.damping * (target - T2)
    raise ConvergenceError(
        f"T2 iteration did not converge at flux {fluxFrac!r} after {cfg.maxIter} steps "
        f"(residual {residual:.3e} W)",
        residual=residual,
    )


def _sweep_point(params: DeviceParams, cfg: SweepConfig, fluxFrac: float) -> SweepRecord:
    if cfg.mode == SELF_CONSISTENT:
        T2, point = solve_self_consistent_T2(params, fluxFrac, cfg)
    else:
        T2 = cfg.fixed_T2
        point = evaluate_point(params, fluxFrac, cfg.T1, T2)
    return SweepRecord(
        float(fluxFrac),
        qubit_frequency(params, fluxFrac),
        tuple(float(r) for r in point.state.rho),
        point.power + cfg.backgroundPower,
        float(T2),
    )


def run_sweep(params: DeviceParams, cfg: SweepConfig, workers: int = 1,
              prominence: float = 0.05) -> SweepResult:
    """Evaluate the transport model on the flux grid of ``cfg``.

    With ``workers > 1`` points are computed in separate processes; records
    are always assembled in grid order, so the result does not depend on
    ``workers``.
    """
    grid = [float(x) for x in cfg.grid()]
    task = partial(_sweep_point, params, cfg)
    if workers > 1 and len(grid) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = tuple(pool.map(task, grid, chunksize=max(1, len(grid) // (4 * workers))))
    else:
        records = tuple(task(x) for x in grid)
    result = SweepResult(cfg, records)
    return SweepResult(cfg, records, find_peaks(result, params, prominence=prominence))


def _refine(x, y, i):
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom >= 0:
        return x[i], y1
    offset = 0.5 * (y0 - y2) / denom
    step = x[i + 1] - x[i]
    return x[i] + offset * step, y1 - 0.25 * (y0 - y2) * offset


# below this prominence (W) a maximum is floating-point noise, e.g. at equilibrium
MIN_PROMINENCE = 1e-24


def find_peaks(result: SweepResult, params: DeviceParams | None = None,
               prominence: float = 0.05) -> PeakAnnotations:
    """Local maxima of the power curve, refined by a three-point parabola.

    The maximum nearest a half-integer flux (within two grid steps) is the
    central peak. Others are ``inner`` when the qubit frequency there is
    closest to the fundamental resonator frequency and ``outer`` when it is
    closer to a higher passband. Peaks with prominence below ``prominence``
    times the central height (or the largest height without a central peak)
    are dropped, as are all maxima with prominence below ``MIN_PROMINENCE``.
    """
    x, y = result.flux, result.power
    if len(x) < 5:
        return PeakAnnotations()
    found, props = _scipy_find_peaks(y, prominence=MIN_PROMINENCE)
    prom = dict(zip(found, props["prominences"]))
    idx = [i for i in found if 0 < i < len(x) - 1]
    if not idx:
        return PeakAnnotations()
    step = x[1] - x[0]

    refined = {i: _refine(x, y, i) for i in idx}
    dist = {i: abs(reduced_detuning(refined[i][0])) for i in idx}
    nearest = min(idx, key=lambda i: dist[i])
    central = nearest if dist[nearest] <= 2.0 * step else None

    scale = refined[central][1] if central is not None else max(refined[i][1] for i in idx)
    threshold = prominence * abs(scale)
    if params is None:
        params = DeviceParams()
    fr = 0.5 * (params.fr1 + params.fr2)

    peaks = []
    for i in idx:
        if i != central and prom[i] < threshold:
            continue
        xf, yf = refined[i]
        if i == central:
            kind = "central"
        else:
            kind = "inner" if round(qubit_frequency(params, xf) / fr) <= 1 else "outer"
        peaks.append(Peak(float(xf), float(yf), float(prom[i]), kind))
    return PeakAnnotations(tuple(peaks))


def switching_curve(params: DeviceParams, T1List, T0: float, backgroundPower: float = 0.0,
                    T2: float | None = None):
    """[(T1, R_on/off)] with on at half flux and off at zero flux; the drain
    is held at ``T2`` (default ``T0``)."""
    T1List = list(T1List)
    if not T1List:
        raise ParameterError("T1List must not be empty")
    T2 = T0 if T2 is None else T2
    out = []
    for T1 in T1List:
        on = power_to_reservoir2(params, 0.5, T1, T2) + backgroundPower
        off = power_to_reservoir2(params, 0.0, T1, T2) + backgroundPower
        out.append((T1, switching_ratio(on, off)))
    return out
