"""Invariant checks run by ``fluxheat validate``."""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
from scipy.optimize import brentq

from . import constants
from .dynamics import evaluate_point, nullspace_populations, tree_populations
from .params import DeviceParams
from .spectrum import build_hamiltonian, eigensystem, eigensystem_closed_form, eigensystem_numeric, jacobi_eigh
from .thermal import CalibrationCurve, ep_power, fit_calibration, invert_ep_power, voltage_to_temperature

PASS, FAIL, SKIPPED = "PASS", "FAIL", "SKIPPED"


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str
    detail: str = ""


def _truth_curve():
    a, b, c = 0.55, 0.1, 4.0e-4
    v_break = c - 10 ** ((0.135 - a) / b)
    return CalibrationCurve((a, b, c), (0.135, -958.0, 2.0e5, 1.0e8), v_break, 0.135, 0.0, c)


# Synthetic NIS calibration used for round-trip checks; the span is fixed below.
SYNTHETIC_CURVE = _truth_curve()


def temperature_to_voltage(curve: CalibrationCurve, T: float) -> float:
    return brentq(lambda v: voltage_to_temperature(curve, v) - T, curve.vMin, curve.vMax * (1 - 1e-15),
                  xtol=1e-18, rtol=1e-15)


def synthetic_points(temps, curve: CalibrationCurve = SYNTHETIC_CURVE, noise: float = 0.0, rng=None):
    """(V, T) pairs from ``curve``, with optional multiplicative voltage noise."""
    pts = []
    for T in temps:
        v = temperature_to_voltage(curve, T)
        if noise:
            v *= 1.0 + noise * rng.standard_normal()
        pts.append((v, T))
    return pts


_FLUX_GRID = np.linspace(0.3, 0.7, 41)
_TEMPS = [(0.3, 0.08), (0.15, 0.2), (0.07, 0.08)]


def check_eigen(params):
    worst = 0.0
    for f in _FLUX_GRID:
        m = build_hamiltonian(params, f)
        scale = np.abs(m).max()
        if params.symmetric:
            ref = eigensystem_closed_form(params, f)
            num = eigensystem_numeric(m, f, reference=ref)
            worst = max(worst, np.abs(ref.energies - num.energies).max() / scale)
            worst = max(worst, 1 - np.abs(np.sum(ref.coeffs * num.coeffs, axis=1)).min())
        else:
            vals, _ = jacobi_eigh(m)
            worst = max(worst, np.abs(np.sort(vals) - np.linalg.eigvalsh(m)).max() / scale)
    ok = worst < 1e-10
    return CheckResult("eigen cross-check", PASS if ok else FAIL, f"worst deviation {worst:.2e}")


def check_detailed_balance(params):
    worst = 0.0
    for f in _FLUX_GRID[::5]:
        for T1, T2 in _TEMPS:
            rates = evaluate_point(params, f, T1, T2).rates
            for g, T in ((rates.gammaR1, T1), (rates.gammaR2, T2)):
                for i in range(4):
                    for j in range(i + 1, 4):
                        if g[i, j] > 0 and g[j, i] > 0:
                            x = constants.hbar * rates.omega[i, j] / (constants.kB * T)
                            worst = max(worst, abs(g[i, j] / g[j, i] / math.exp(x) - 1))
    ok = worst < 1e-8
    return CheckResult("detailed balance", PASS if ok else FAIL, f"worst relative error {worst:.2e}")


def check_dark_state(params):
    if not params.symmetric:
        return CheckResult("dark state", SKIPPED, "not applicable: asymmetric couplings or resonators")
    bad = []
    for f in _FLUX_GRID:
        p = evaluate_point(params, f, 0.3, 0.08)
        rates = p.rates
        if p.state.rho[1] != 0 or any(g[1].any() or g[:, 1].any() for g in (rates.gammaR1, rates.gammaR2)):
            bad.append(f)
    return CheckResult("dark state", FAIL if bad else PASS, f"{len(bad)} flux points with leakage")


def check_steady_state(params):
    solver = nullspace_populations if params.symmetric else tree_populations
    pop, cons = 0.0, 0.0
    for f in _FLUX_GRID[::4]:
        for T1, T2 in _TEMPS:
            p = evaluate_point(params, f, T1, T2)
            rho = p.state.rho
            pop = max(pop, abs(rho.sum() - 1), np.abs(rho - solver(p.rates.total)).max())
            if p.state.powerTo2 != 0:
                cons = max(cons, abs(p.state.powerTo1 + p.state.powerTo2) / abs(p.state.powerTo2))
    ok = pop < 1e-10 and cons < 1e-12
    return CheckResult("steady state", PASS if ok else FAIL,
                       f"population deviation {pop:.2e}, energy imbalance {cons:.2e}")


def check_equilibrium(params):
    worst = 0.0
    for f in _FLUX_GRID[::4]:
        ref = abs(evaluate_point(params, f, 0.3, 0.08).power)
        eq = abs(evaluate_point(params, f, 0.2, 0.2).power)
        peak = abs(evaluate_point(params, 0.5, 0.3, 0.08).power)
        worst = max(worst, eq / max(ref, peak))
    ok = worst < 1e-3
    return CheckResult("equilibrium null power", PASS if ok else FAIL, f"worst ratio {worst:.2e}")


def check_ep_round_trip(params):
    worst = 0.0
    for T0 in (0.05, 0.08, 0.15):
        floor = params.sigmaV2 * T0**params.nExp
        for P in (-0.9 * floor, -0.5 * floor, 0.0, 1e-15, 1e-14, 5e-14):
            Te = invert_ep_power(params.sigmaV2, params.nExp, P, T0)
            back = ep_power(params.sigmaV2, params.nExp, Te, T0)
            worst = max(worst, abs(back - P) / max(abs(P), params.sigmaV2 * T0**params.nExp))
    ok = worst < 1e-12
    return CheckResult("electron-phonon round trip", PASS if ok else FAIL, f"worst {worst:.2e}")


def check_calibration(params):
    temps = np.arange(0.080, 0.366, 0.005)
    curve = fit_calibration(synthetic_points(temps))
    true = SYNTHETIC_CURVE
    coeff_err = max(
        abs(x - y) / abs(y)
        for x, y in zip(curve.lowRange + curve.highRange[1:], true.lowRange + true.highRange[1:])
    )
    ok = coeff_err < 0.01
    return CheckResult("calibration round trip", PASS if ok else FAIL,
                       f"worst coefficient error {coeff_err:.2e}")


CHECK_NAMES = {}
CHECKS = (
    check_eigen,
    check_detailed_balance,
    check_dark_state,
    check_steady_state,
    check_equilibrium,
    check_ep_round_trip,
    check_calibration,
)


def run_checks(params: DeviceParams):
    out = []
    for check in CHECKS:
        try:
            out.append(check(params))
        except Exception as exc:  # a crash is a failed invariant
            out.append(CheckResult(CHECK_NAMES[check], FAIL, f"{type(exc).__name__}: {exc}"))
    return out

CHECK_NAMES.update({
    check_eigen: "eigen cross-check",
    check_detailed_balance: "detailed balance",
    check_dark_state: "dark state",
    check_steady_state: "steady state",
    check_equilibrium: "equilibrium null power",
    check_ep_round_trip: "electron-phonon round trip",
    check_calibration: "calibration round trip",
})
