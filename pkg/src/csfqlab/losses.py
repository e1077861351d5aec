"""Relaxation channels: thermal photons, quasiparticles and Purcell decay.

Rates are in s^-1 and frequencies in Hz unless a parameter name says
otherwise (the Purcell inputs are angular frequencies).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional

import numpy as np

from csfqlab.constants import h, kB, ueV
from csfqlab.numerics import find_root

DEFAULT_GAP = 200 * ueV

STIMULATED = "stimulated"
TWO_NBAR = "two_nbar"
CONVENTIONS = (STIMULATED, TWO_NBAR)


class LossModelError(ValueError):
    pass


def nbar(freq: float, temp: float) -> float:
    """Bose-Einstein occupation of a mode at `freq` (Hz) in a bath at `temp` (K)."""
    if freq <= 0:
        raise LossModelError(f"frequency must be positive, got {freq}")
    if temp < 0:
        raise LossModelError(f"temperature must be non-negative, got {temp}")
    if temp == 0:
        return 0.0
    x = h * freq / (kB * temp)
    if x > 700:
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def thermal_enhancement(freq: float, temp: float, convention: str = STIMULATED) -> float:
    """Relaxation-rate multiplier produced by a thermal bath."""
    n = nbar(freq, temp)
    if convention == STIMULATED:
        return 1.0 + 2.0 * n
    if convention == TWO_NBAR:
        return 2.0 * n
    raise LossModelError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")


def effective_bath_temperature(rate_ratio: float, freq: float, convention: str = STIMULATED) -> float:
    """Bath temperature whose thermal enhancement equals `rate_ratio`."""
    if convention == STIMULATED:
        if rate_ratio < 1:
            raise LossModelError(f"rate ratio must be >= 1 under {STIMULATED!r}, got {rate_ratio}")
        if rate_ratio == 1:
            return 0.0
    elif convention == TWO_NBAR:
        if rate_ratio <= 0:
            raise LossModelError(f"rate ratio must be > 0 under {TWO_NBAR!r}, got {rate_ratio}")
    else:
        raise LossModelError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")

    t_scale = h * freq / kB
    # the enhancement is monotone in T; solve in log T for a well-scaled bracket
    def g(log_t):
        return thermal_enhancement(freq, math.exp(log_t), convention) - rate_ratio

    lo = math.log(t_scale * 1e-3)
    hi = math.log(t_scale * max(10.0, 10.0 * rate_ratio))
    return math.exp(find_root(g, (lo, hi), tolerance=1e-14))


def xqp_thermal(temp: float, gap: float = DEFAULT_GAP) -> float:
    """Equilibrium quasiparticle density per Cooper pair, sqrt(2 pi kT / D) exp(-D / kT)."""
    if gap <= 0:
        raise LossModelError(f"gap must be positive, got {gap}")
    if temp <= 0:
        return 0.0
    kt = kB * temp
    return math.sqrt(2 * math.pi * kt / gap) * math.exp(-gap / kt)


@dataclass(frozen=True)
class QuasiparticleModel:
    """Gamma_qp(T) = scale * x_qp(T), calibrated at one reference point."""

    gap: float
    scale: float
    calibration_point: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.gap > 0:
            raise LossModelError(f"gap must be positive, got {self.gap}")
        if not self.scale > 0:
            raise LossModelError(f"scale must be positive, got {self.scale}")

    def rate(self, temp: float) -> float:
        return self.scale * xqp_thermal(temp, self.gap)


def calibrate_qp(gap: float, t1_base: float, t1_ref: float, temp_ref: float) -> QuasiparticleModel:
    """Attribute the excess rate 1/t1_ref - 1/t1_base at `temp_ref` to quasiparticles."""
    if temp_ref <= 0:
        raise LossModelError(f"reference temperature must be positive, got {temp_ref}")
    if not t1_ref < t1_base:
        raise LossModelError(
            f"t1_ref ({t1_ref:g} s) must be shorter than t1_base ({t1_base:g} s): "
            "no excess rate to attribute to quasiparticles"
        )
    excess = 1.0 / t1_ref - 1.0 / t1_base
    scale = excess / xqp_thermal(temp_ref, gap)
    return QuasiparticleModel(gap, scale, {"temp": temp_ref, "gamma": excess})


@dataclass(frozen=True)
class LossBudget:
    gamma_intrinsic: float
    gamma_qp: float
    gamma_purcell: float
    thermal_factor: float
    temp: float

    @property
    def total_rate(self) -> float:
        return self.thermal_factor * self.gamma_intrinsic + self.gamma_qp + self.gamma_purcell

    @property
    def t1(self) -> float:
        rate = self.total_rate
        return math.inf if rate == 0 else 1.0 / rate


def purcell_rate(g: float, detuning: float, kappa: float) -> float:
    """Dispersive Purcell rate kappa (g / detuning)^2; arguments in rad/s."""
    if g == 0:
        return 0.0
    if abs(detuning) <= abs(g):
        raise LossModelError(
            f"|detuning| = {abs(detuning):.4g} rad/s does not exceed g = {abs(g):.4g} rad/s; "
            "outside the dispersive regime"
        )
    return kappa * (g / detuning) ** 2


def quality_factor(freq: float, t1: float) -> float:
    if freq <= 0 or t1 <= 0:
        raise LossModelError("frequency and T1 must both be positive")
    return 2 * math.pi * freq * t1


def combine(
    gamma_intrinsic: float,
    model: Optional[QuasiparticleModel] = None,
    temp: float = 0.0,
    g: float = 0.0,
    detuning: Optional[float] = None,
    kappa: float = 0.0,
    bath_temp: float = 0.0,
    freq: Optional[float] = None,
) -> LossBudget:
    """Assemble independent channels into one budget.

    The intrinsic rate is multiplied by 1 + 2 nbar(freq, bath_temp); a
    non-zero `bath_temp` therefore needs `freq`.
    """
    if gamma_intrinsic < 0:
        raise LossModelError("intrinsic rate must be non-negative")
    gamma_qp = model.rate(temp) if model is not None else 0.0
    gamma_p = purcell_rate(g, detuning, kappa) if (g and detuning is not None) else 0.0
    if bath_temp > 0:
        if freq is None:
            raise LossModelError("a bath temperature needs the qubit frequency")
        factor = thermal_enhancement(freq, bath_temp, STIMULATED)
    else:
        factor = 1.0
    return LossBudget(gamma_intrinsic, gamma_qp, gamma_p, factor, temp)


def t1_vs_temperature(
    model: QuasiparticleModel,
    gamma_intrinsic: float,
    temps: Iterable[float],
    gamma_purcell: float = 0.0,
) -> List[LossBudget]:
    out = []
    for T in temps:
        if T <= 0:
            raise LossModelError(f"temperatures must be positive, got {T}")
        out.append(LossBudget(gamma_intrinsic, model.rate(T), gamma_purcell, 1.0, float(T)))
    return out


def rolloff_temperature(model: QuasiparticleModel, gamma_intrinsic: float) -> float:
    """Temperature at which the quasiparticle rate equals the intrinsic rate (T1 halves)."""
    t_gap = model.gap / kB

    def g(T):
        return model.rate(T) - gamma_intrinsic

    return find_root(g, (t_gap / 200, t_gap), tolerance=1e-12)


def t1_curve(model: QuasiparticleModel, gamma_intrinsic: float, temps) -> np.ndarray:
    return np.array([b.t1 for b in t1_vs_temperature(model, gamma_intrinsic, temps)])
