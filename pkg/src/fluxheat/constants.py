"""Physical constants in SI units (CODATA 2018 exact values)."""
from dataclasses import dataclass
import math

from scipy import constants as _sc


@dataclass(frozen=True)
class PhysConstants:
    h: float = _sc.h
    kB: float = _sc.k
    e: float = _sc.e

    @property
    def hbar(self) -> float:
        return self.h / (2.0 * math.pi)

    @property
    def Phi0(self) -> float:
        return self.h / (2.0 * self.e)


CONST = PhysConstants()

h = CONST.h
hbar = CONST.hbar
kB = CONST.kB
e = CONST.e
Phi0 = CONST.Phi0
