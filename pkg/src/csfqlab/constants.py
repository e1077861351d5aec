"""Physical constants (CODATA 2018, exact SI definitions where applicable)."""

from dataclasses import dataclass
import math


@dataclass(frozen=True)
class PhysicalConstants:
    h: float = 6.62607015e-34
    kB: float = 1.380649e-23
    e: float = 1.602176634e-19

    @property
    def hbar(self) -> float:
        return self.h / (2 * math.pi)

    @property
    def Phi0(self) -> float:
        return self.h / (2 * self.e)


CONST = PhysicalConstants()

h = CONST.h
hbar = CONST.hbar
kB = CONST.kB
e = CONST.e
Phi0 = CONST.Phi0

GHz = 1e9
MHz = 1e6
kHz = 1e3
us = 1e-6
ns = 1e-9
fF = 1e-15
uA = 1e-6
ueV = 1e-6 * e
