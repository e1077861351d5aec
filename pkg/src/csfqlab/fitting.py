"""Least-squares estimation of circuit parameters from observed transitions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from csfqlab.constants import fF, uA
from csfqlab.model import DEFAULT_CUTOFF, DeviceParams, relative_levels
from csfqlab.numerics import MinimizeOptions, minimize

PARAM_NAMES = ("I0", "alpha", "Cs", "Cj")

BOUNDS = {
    "I0": (0.05 * uA, 1.0 * uA, True),
    "alpha": (0.2, 0.8, False),
    "Cs": (10 * fF, 300 * fF, True),
    "Cj": (0.1 * fF, 20 * fF, True),
}

_PENALTY = 1e300


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class TransitionObservation:
    flux: float
    i: int
    j: int
    freq: float
    weight: float = 1.0

    def __post_init__(self):
        if not self.j > self.i >= 0:
            raise FitError(f"need 0 <= i < j, got i={self.i}, j={self.j}")
        if not self.freq > 0:
            raise FitError(f"observed frequency must be positive, got {self.freq}")
        if not self.weight > 0:
            raise FitError(f"weight must be positive, got {self.weight}")


@dataclass
class FitOptions:
    restarts: int = 5
    jitter: float = 0.1
    seed: int = 0
    tolerance: float = 1e-9
    max_iterations: int = 3000
    charge_cutoff: int = DEFAULT_CUTOFF


@dataclass
class FitResult:
    params: DeviceParams
    residual_rms: float
    iterations: int
    converged: bool
    per_point_errors: np.ndarray
    free: tuple = ()
    evaluations: int = 0


def in_bounds(name: str, value: float) -> bool:
    lo, hi, closed = BOUNDS[name]
    return lo <= value <= hi if closed else lo < value < hi


def model_frequencies(
    params: DeviceParams, observations: Sequence[TransitionObservation], charge_cutoff: int = DEFAULT_CUTOFF
) -> np.ndarray:
    """Model transition frequency (Hz) for each observation, one diagonalization per flux."""
    need: Dict[float, int] = {}
    for ob in observations:
        need[ob.flux] = max(need.get(ob.flux, 0), ob.j + 1)
    levels = {f: relative_levels(params, f, n, charge_cutoff) for f, n in need.items()}
    return np.array([levels[ob.flux][ob.j] - levels[ob.flux][ob.i] for ob in observations])


def _weighted_ms(errors: np.ndarray, weights: np.ndarray) -> float:
    return float(np.sum(weights * errors**2) / np.sum(weights))


def _normalize_free(free: Iterable[str]) -> tuple:
    names = []
    lookup = {n.lower(): n for n in PARAM_NAMES}
    for name in free:
        key = lookup.get(str(name).lower())
        if key is None:
            raise FitError(f"unknown free parameter {name!r}; choose from {PARAM_NAMES}")
        if key not in names:
            names.append(key)
    return tuple(names)


def fit(
    observations: Sequence[TransitionObservation],
    start: DeviceParams,
    free: Iterable[str] = ("I0", "alpha", "Cs"),
    options: Optional[FitOptions] = None,
) -> FitResult:
    """Fit the free circuit parameters to observed transition frequencies.

    Parameters are searched as ratios to their starting values. Trial points
    outside the parameter bounds are rejected by the simplex.
    """
    opts = options or FitOptions()
    names = _normalize_free(free)
    obs = list(observations)
    if len(obs) < len(names):
        raise FitError(f"{len(obs)} observations cannot constrain {len(names)} free parameters")
    if not obs:
        raise FitError("no observations supplied")
    observed = np.array([ob.freq for ob in obs])
    weights = np.array([ob.weight for ob in obs])
    scale0 = np.array([getattr(start, n) for n in names], dtype=float)

    def params_at(x):
        return start.with_(**{n: float(v) for n, v in zip(names, scale0 * x)})

    def objective(x):
        values = scale0 * x
        if not all(in_bounds(n, v) for n, v in zip(names, values)):
            return _PENALTY
        err = model_frequencies(params_at(x), obs, opts.charge_cutoff) - observed
        # GHz^2 keeps the objective O(1) near a good fit
        return _weighted_ms(err / 1e9, weights)

    x0 = np.ones(len(names))
    errors0 = model_frequencies(start, obs, opts.charge_cutoff) - observed
    if not names or not np.any(errors0):
        return FitResult(start, math.sqrt(_weighted_ms(errors0, weights)), 0, True, errors0, names, 1)

    res = minimize(
        objective,
        x0,
        MinimizeOptions(
            tolerance=opts.tolerance,
            max_iterations=opts.max_iterations,
            restarts=opts.restarts,
            jitter=opts.jitter,
            seed=opts.seed,
        ),
    )
    best = params_at(res.argmin)
    errors = model_frequencies(best, obs, opts.charge_cutoff) - observed
    return FitResult(
        best,
        math.sqrt(_weighted_ms(errors, weights)),
        res.iterations,
        res.converged,
        errors,
        names,
        res.evaluations,
    )


def sensitivity(
    params: DeviceParams,
    observation: TransitionObservation,
    free: Iterable[str] = ("I0", "alpha", "Cs"),
    rel_step: float = 1e-4,
    charge_cutoff: int = DEFAULT_CUTOFF,
) -> Dict[str, float]:
    """Central finite-difference gradient of one transition frequency (Hz per SI unit).

    Besides the circuit parameters, ``"flux"`` may be listed to differentiate
    with respect to the reduced flux bias.
    """
    out = {}
    for name in free:
        if str(name).lower() == "flux":
            f0 = observation.flux
            step = rel_step * abs(f0) if f0 else rel_step

            def at(f):
                lv = relative_levels(params, f, observation.j + 1, charge_cutoff)
                return lv[observation.j] - lv[observation.i]

            out["flux"] = (at(f0 + step) - at(f0 - step)) / (2 * step)
            continue
        key = _normalize_free([name])[0]
        v0 = getattr(params, key)
        step = rel_step * abs(v0)
        plus = model_frequencies(params.with_(**{key: v0 + step}), [observation], charge_cutoff)[0]
        minus = model_frequencies(params.with_(**{key: v0 - step}), [observation], charge_cutoff)[0]
        out[key] = (plus - minus) / (2 * step)
    return out
