"""Electron-phonon balance, heater power, NIS thermometer calibration and
switching ratio."""
from __future__ import annotations

from dataclasses import dataclass
import json
import math
from pathlib import Path

import numpy as np
from scipy.optimize import curve_fit
from scipy.stats import kendalltau

from .errors import CalibrationError, ExtrapolationError, ParameterError


def ep_power(sigmaV: float, n: int, Te: float, T0: float) -> float:
    """Electron-phonon power sigmaV*(Te^n - T0^n), positive for hot electrons."""
    if not (sigmaV > 0 and Te > 0 and T0 > 0):
        raise ParameterError("sigmaV, Te and T0 must be > 0")
    return sigmaV * (Te**n - T0**n)


def invert_ep_power(sigmaV: float, n: int, P: float, T0: float) -> float:
    """Electron temperature at which the electron-phonon power equals ``P``."""
    if not (sigmaV > 0 and T0 > 0):
        raise ParameterError("sigmaV and T0 must be > 0")
    base = P / sigmaV + T0**n
    if base < 0:
        raise ParameterError(f"power {P!r} W is below the floor -sigmaV*T0^n")
    return base ** (1.0 / n)


def heater_power(I: float, Rheater: float) -> float:
    """Joule power I^2 R / 2 dissipated by an NIS heater junction."""
    if not Rheater > 0:
        raise ParameterError("Rheater must be > 0")
    return 0.5 * I * I * Rheater


def switching_ratio(P_on: float, P_off: float) -> float:
    """(P_on - P_off) / P_on, with on at half flux and off at zero flux."""
    if P_on == 0:
        raise ParameterError("switching ratio undefined for P_on = 0")
    return (P_on - P_off) / P_on


# -- thermometer calibration --------------------------------------------------

BREAK_TEMPERATURE = 0.135
MIN_POINTS_PER_RANGE = 4
MIN_RANK_ORDER = 0.9


def _log_branch(v, a, b, c):
    return a + b * np.log10(c - v)


@dataclass(frozen=True)
class CalibrationCurve:
    """Thermal voltage to temperature map of a current-biased SINIS thermometer.

    Below ``breakTemp``: T = a + b*log10(c - V). Above: a cubic in
    (V - breakVoltage) that passes through (breakVoltage, breakTemp).
    """

    lowRange: tuple  # (a, b, c)
    highRange: tuple  # cubic coefficients k0..k3 in powers of (V - breakVoltage)
    breakVoltage: float
    breakTemp: float
    vMin: float
    vMax: float
    residualRms: float = 0.0

    def __call__(self, V):
        return voltage_to_temperature(self, V)

    def to_json(self) -> str:
        data = {
            "lowRange": list(self.lowRange),
            "highRange": list(self.highRange),
            "breakVoltage": self.breakVoltage,
            "breakTemp": self.breakTemp,
            "vMin": self.vMin,
            "vMax": self.vMax,
            "residualRms": self.residualRms,
        }
        # repr-round-trip floats
        return json.dumps(data, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "CalibrationCurve":
        d = json.loads(text)
        return cls(tuple(d["lowRange"]), tuple(d["highRange"]), d["breakVoltage"],
                   d["breakTemp"], d["vMin"], d["vMax"], d.get("residualRms", 0.0))


def _eval_low(curve, v):
    a, b, c = curve.lowRange
    return a + b * math.log10(c - v)


def _eval_high(curve, v):
    x = v - curve.breakVoltage
    k0, k1, k2, k3 = curve.highRange
    return k0 + x * (k1 + x * (k2 + x * k3))


def voltage_to_temperature(curve: CalibrationCurve, V: float) -> float:
    if not curve.vMin <= V <= curve.vMax:
        raise ExtrapolationError(
            f"voltage {V!r} V outside calibrated span [{curve.vMin!r}, {curve.vMax!r}]"
        )
    # higher voltage means colder
    if V >= curve.breakVoltage:
        return _eval_low(curve, V)
    return _eval_high(curve, V)


def fit_calibration(points, break_temp: float = BREAK_TEMPERATURE) -> CalibrationCurve:
    """Fit the two-branch calibration to (thermal voltage, bath temperature) pairs.

    The log branch is fitted first; the break voltage is where it reaches
    ``break_temp`` and the cubic is constrained to pass through that point.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise CalibrationError("points must be (voltage, temperature) pairs")
    pts = pts[np.argsort(pts[:, 1], kind="stable")]
    v, t = pts[:, 0], pts[:, 1]
    if np.any(np.diff(t) == 0) or len(np.unique(v)) < len(v):
        raise CalibrationError("voltage must decrease with temperature: repeated voltage or temperature")
    # noisy data may swap neighbours; the overall ordering must still be decreasing
    tau = kendalltau(v, t).statistic
    if not tau <= -MIN_RANK_ORDER:
        raise CalibrationError(f"voltage must decrease with temperature (Kendall tau {tau:.3f})")
    low = t < break_temp
    if low.sum() < MIN_POINTS_PER_RANGE or (~low).sum() < MIN_POINTS_PER_RANGE:
        raise CalibrationError(
            f"need at least {MIN_POINTS_PER_RANGE} points on each side of {break_temp} K, "
            f"got {int(low.sum())} below and {int((~low).sum())} above"
        )

    vl, tl = v[low], t[low]
    span = vl.max() - vl.min()
    # start from a linear fit in log10(c - V) with c just above the data
    c0 = vl.max() + 0.5 * span
    A = np.column_stack([np.ones_like(vl), np.log10(c0 - vl)])
    (a0, b0), *_ = np.linalg.lstsq(A, tl, rcond=None)
    try:
        (a, b, c), _ = curve_fit(
            _log_branch, vl, tl, p0=(a0, b0, c0),
            bounds=([-np.inf, 0.0, vl.max() + 1e-6 * span], np.inf),
            x_scale=(abs(a0) or 1.0, abs(b0) or 1.0, span), max_nfev=20000,
        )
    except RuntimeError as exc:
        raise CalibrationError(f"log-branch fit did not converge: {exc}") from exc

    v_break = c - 10 ** ((break_temp - a) / b)

    vh, th = v[~low], t[~low]
    x = vh - v_break
    X = np.column_stack([x, x**2, x**3])
    (k1, k2, k3), *_ = np.linalg.lstsq(X, th - break_temp, rcond=None)

    curve = CalibrationCurve(
        (float(a), float(b), float(c)),
        (float(break_temp), float(k1), float(k2), float(k3)),
        float(v_break), float(break_temp), float(v.min()), float(v.max()),
    )
    model = np.array([voltage_to_temperature(curve, vi) for vi in v])
    rms = float(np.sqrt(np.mean((model - t) ** 2)))
    mono = np.linspace(curve.vMin, curve.vMax, 512)
    if np.any(np.diff([voltage_to_temperature(curve, vi) for vi in mono]) >= 0):
        raise CalibrationError("fitted curve is not monotone over the calibrated span")
    return CalibrationCurve(curve.lowRange, curve.highRange, curve.breakVoltage,
                            curve.breakTemp, curve.vMin, curve.vMax, rms)


def read_calibration_points(path):
    """Two-column text file: voltage (V), temperature (K); '#' comments;
    whitespace or comma separated."""
    rows = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].replace(",", " ").split()
        if not line:
            continue
        if len(line) != 2:
            raise CalibrationError(f"{path}:{lineno}: expected two columns")
        try:
            rows.append((float(line[0]), float(line[1])))
        except ValueError:
            raise CalibrationError(f"{path}:{lineno}: not a number") from None
    return rows
