"""Quantum current and flux noise of a resistive reservoir.

Positive angular frequency is energy given to the bath (system emission),
negative is energy taken from it, so S(w)/S(-w) = exp(hbar*w/kB*T).
"""
from __future__ import annotations

from dataclasses import dataclass
import math

from .constants import hbar, kB
from .errors import ParameterError

# beyond this hbar|w|/kT the absorption side underflows to zero
_MAX_EXPONENT = 700.0


def quantum_factor(omega: float, T: float) -> float:
    """hbar*w / (1 - exp(-hbar*w/kB*T)) in J, with the w -> 0 limit kB*T."""
    if T <= 0:
        raise ParameterError(f"temperature must be > 0, got {T!r}")
    x = hbar * omega / (kB * T)
    if x == 0.0:
        return kB * T
    if x < -_MAX_EXPONENT:
        return 0.0
    return hbar * omega / -math.expm1(-x)


def bare_current_noise(R: float, T: float, omega: float) -> float:
    """Current noise of a resistor, 2*hbar*w / (R*(1 - exp(-hbar*w/kT))), in A^2 s."""
    if R <= 0:
        raise ParameterError(f"R must be > 0, got {R!r}")
    return 2.0 * quantum_factor(omega, T) / R


def resonator_transmission(f: float, f_r: float, R: float, Zinf: float) -> float:
    """Power transmission |t|^2 of an R-terminated half-wave line at frequency ``f``."""
    if f_r <= 0 or R <= 0 or Zinf <= 0:
        raise ParameterError("f_r, R and Zinf must be > 0")
    x = math.pi * f / f_r
    return 1.0 / (math.cos(x) ** 2 + (Zinf / R) ** 2 * math.sin(x) ** 2)


@dataclass(frozen=True)
class ResonatorFilter:
    f_r: float
    Zinf: float


@dataclass(frozen=True)
class InductiveFilter:
    L: float


@dataclass(frozen=True)
class NoiseChannel:
    """One reservoir as seen by the qubit through its coupling filter."""

    reservoirTemp: float
    R: float
    filter: ResonatorFilter | InductiveFilter
    M: float

    def __post_init__(self):
        if not self.reservoirTemp > 0:
            raise ParameterError(f"reservoirTemp must be > 0, got {self.reservoirTemp!r}")
        if not self.R > 0:
            raise ParameterError(f"R must be > 0, got {self.R!r}")
        if isinstance(self.filter, ResonatorFilter):
            if not (self.filter.f_r > 0 and self.filter.Zinf > 0):
                raise ParameterError("resonator filter needs f_r > 0 and Zinf > 0")
        elif isinstance(self.filter, InductiveFilter):
            if not self.filter.L > 0:
                raise ParameterError("inductive filter needs L > 0")
        else:
            raise ParameterError(f"unknown filter {self.filter!r}")


def flux_noise(channel: NoiseChannel, omega: float) -> float:
    """Flux noise spectral density (Wb^2 s) on the qubit from one reservoir."""
    T, R, M = channel.reservoirTemp, channel.R, channel.M
    flt = channel.filter
    if isinstance(flt, ResonatorFilter):
        t2 = resonator_transmission(abs(omega) / (2.0 * math.pi), flt.f_r, R, flt.Zinf)
        return M * M * t2 * bare_current_noise(R, T, omega)
    wl = omega * flt.L
    return 2.0 * M * M * R / (R * R + wl * wl) * quantum_factor(omega, T)
