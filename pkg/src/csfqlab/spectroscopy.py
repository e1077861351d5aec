"""Thermal level populations and synthetic qubit spectroscopy traces."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from csfqlab.constants import GHz, MHz, h, kB
from csfqlab.model import EnergySpectrum, TransitionSet


class SpectroscopyError(ValueError):
    pass


@dataclass
class ThermalState:
    temp: float
    populations: np.ndarray


@dataclass(frozen=True)
class Peak:
    center: float
    width: float
    height: float
    label: Tuple[int, int, int]


@dataclass
class SpectroscopyTrace:
    freqs: np.ndarray
    amplitude: np.ndarray
    peaks: List[Peak] = field(default_factory=list)

    def visible_labels(self, order: Optional[int] = None) -> set:
        return {p.label for p in self.peaks if order is None or p.label[2] == order}


@dataclass
class TraceConfig:
    """Synthesis settings; `width_1photon` is a full width at half maximum in Hz."""

    f_lo: float = 4.8 * GHz
    f_hi: float = 6.2 * GHz
    n_points: int = 2801
    width_1photon: float = 50 * MHz
    multiphoton_width_factor: float = 5.0
    multiphoton_amp_factor: float = 0.3
    visibility_floor: float = 0.01

    def __post_init__(self):
        if not self.f_lo < self.f_hi:
            raise SpectroscopyError(f"frequency grid needs f_lo < f_hi, got [{self.f_lo}, {self.f_hi}]")
        if self.n_points < 2:
            raise SpectroscopyError("frequency grid needs at least 2 points")
        for name in ("width_1photon", "multiphoton_width_factor", "multiphoton_amp_factor"):
            if not getattr(self, name) > 0:
                raise SpectroscopyError(f"{name} must be positive")
        if self.visibility_floor < 0:
            raise SpectroscopyError("visibility_floor must be non-negative")


def boltzmann_weights(levels: Sequence[float], temp: float) -> np.ndarray:
    levels = np.asarray(levels, dtype=float)
    if temp < 0:
        raise SpectroscopyError(f"temperature must be non-negative, got {temp}")
    if temp == 0:
        p = np.zeros_like(levels)
        p[0] = 1.0
        return p
    x = h * (levels - levels[0]) / (kB * temp)
    w = np.exp(-x)
    return w / w.sum()


def gibbs_populations(spec: EnergySpectrum, temp: float, n_levels: Optional[int] = None) -> ThermalState:
    """Equilibrium populations over the lowest `n_levels` levels of `spec`."""
    levels = np.asarray(spec.levels, dtype=float)
    n = len(levels) if n_levels is None else n_levels
    if not 1 <= n <= len(levels):
        raise SpectroscopyError(f"n_levels must lie in [1, {len(levels)}], got {n}")
    return ThermalState(float(temp), boltzmann_weights(levels[:n], temp))


def infer_effective_temperature(levels: Sequence[float], ratio: float) -> float:
    """Temperature implied by the population ratio p1/p0 across the first gap."""
    if not 0 <= ratio < 1:
        raise SpectroscopyError(
            f"population ratio must lie in [0, 1) for a thermal state, got {ratio}"
        )
    if ratio == 0:
        return 0.0
    gap = float(levels[1]) - float(levels[0])
    return h * gap / (kB * math.log(1.0 / ratio))


def lorentzian(f: np.ndarray, center: float, fwhm: float, height: float) -> np.ndarray:
    hw2 = (0.5 * fwhm) ** 2
    return height * hw2 / ((f - center) ** 2 + hw2)


def synthesize_trace(
    trans: TransitionSet, state: ThermalState, config: Optional[TraceConfig] = None
) -> SpectroscopyTrace:
    """Sum of Lorentzians, one per transition, weighted by the initial-state population.

    An m-photon line is suppressed in height by amp_factor**(m-1) and narrowed
    by width_factor**(m-1). Lines below `visibility_floor` of the tallest line
    still contribute to the amplitude but are left out of `peaks`.
    """
    cfg = config or TraceConfig()
    freqs = np.linspace(cfg.f_lo, cfg.f_hi, cfg.n_points)
    amplitude = np.zeros_like(freqs)
    pops = np.asarray(state.populations, dtype=float)

    lines = []
    for t in trans:
        p = pops[t.i] if t.i < len(pops) else 0.0
        height = p * cfg.multiphoton_amp_factor ** (t.order - 1)
        width = cfg.width_1photon / cfg.multiphoton_width_factor ** (t.order - 1)
        lines.append(Peak(t.freq, width, float(height), (t.i, t.j, t.order)))
        if height > 0:
            amplitude += lorentzian(freqs, t.freq, width, height)

    tallest = max((p.height for p in lines), default=0.0)
    peaks = [
        p
        for p in lines
        if p.height > 0
        and p.height >= cfg.visibility_floor * tallest
        and cfg.f_lo <= p.center <= cfg.f_hi
    ]
    peaks.sort(key=lambda p: (p.center, p.label))
    return SpectroscopyTrace(freqs, amplitude, peaks)
