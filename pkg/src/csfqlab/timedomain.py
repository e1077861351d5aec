"""Synthetic T1 / Ramsey / echo decay curves, their fits, and T2 bookkeeping."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from csfqlab.numerics import MinimizeOptions, minimize

KINDS = ("t1", "ramsey", "echo")
SHAPES = ("exponential", "gaussian")
DEFAULT_RAMSEY_DETUNING = 250e3


class DecayFitError(RuntimeError):
    """Raised when a decay curve cannot be fitted to a meaningful time constant."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


@dataclass
class DecayCurve:
    times: np.ndarray
    signal: np.ndarray
    kind: str
    truth: Optional[dict] = None
    shape: str = "exponential"

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.signal = np.asarray(self.signal, dtype=float)
        if self.kind not in KINDS:
            raise ValueError(f"unknown curve kind {self.kind!r}")
        if self.shape not in SHAPES:
            raise ValueError(f"unknown decay shape {self.shape!r}")
        if self.times.shape != self.signal.shape:
            raise ValueError("times and signal lengths differ")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly ascending")


def _envelope(t, tau, shape):
    if shape == "gaussian":
        return np.exp(-((t / tau) ** 2))
    return np.exp(-t / tau)


def _basis(kind, shape, t, tau, detuning):
    env = _envelope(t, tau, "exponential" if kind != "echo" else shape)
    if kind == "ramsey":
        env = env * np.cos(2 * np.pi * detuning * t)
    return env


def generate(
    kind: str,
    tau: float,
    times,
    amplitude: float = 1.0,
    offset: float = 0.0,
    detuning: float = DEFAULT_RAMSEY_DETUNING,
    shape: str = "exponential",
    noise: float = 0.0,
    rng: Optional[np.random.Generator] = None,
) -> DecayCurve:
    """Sample A * envelope(t) + B, optionally with Gaussian noise of std `noise * A`.

    `tau` is T1 for ``kind="t1"``, T2* for ``"ramsey"`` and T2 for ``"echo"``;
    only echo curves honour ``shape="gaussian"``.
    """
    if tau <= 0:
        raise ValueError(f"time constant must be positive, got {tau}")
    if kind not in KINDS:
        raise ValueError(f"unknown curve kind {kind!r}")
    times = np.asarray(times, dtype=float)
    det = detuning if kind == "ramsey" else 0.0
    signal = amplitude * _basis(kind, shape, times, tau, det) + offset
    if noise:
        if rng is None:
            raise ValueError("noisy curves need an explicit random generator")
        signal = signal + rng.normal(0.0, noise * abs(amplitude), size=times.shape)
    truth = {"tau": tau, "amplitude": amplitude, "offset": offset, "shape": shape}
    if kind == "ramsey":
        truth["detuning"] = detuning
    return DecayCurve(times, signal, kind, truth, shape if kind == "echo" else "exponential")


@dataclass
class DecayFit:
    kind: str
    tau: float
    amplitude: float
    offset: float
    detuning: Optional[float]
    residual_rms: float
    converged: bool
    shape: str = "exponential"
    extras: dict = field(default_factory=dict)


def _linear_fit(basis, y):
    X = np.column_stack([basis, np.ones_like(basis)])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    return coef, float(np.mean(resid**2))


def _initial_tau(t, y):
    """Time at which the signal first falls to 1/e of its initial excursion."""
    a0, b0 = y[0], y[-1]
    level = b0 + (a0 - b0) / math.e
    below = np.nonzero((y - level) * np.sign(a0 - b0) <= 0)[0]
    if len(below):
        return max(float(t[below[0]] - t[0]), float(t[1] - t[0]))
    return float(t[-1] - t[0]) / 2


def _initial_detuning(t, y):
    y = y - np.mean(y)
    n = 8 * len(t)
    dt = float(np.mean(np.diff(t)))
    spec = np.abs(np.fft.rfft(y * np.hanning(len(y)), n=n))
    freqs = np.fft.rfftfreq(n, dt)
    return float(freqs[np.argmax(spec)])


def extract(curve: DecayCurve, shape: Optional[str] = None, options: Optional[MinimizeOptions] = None) -> DecayFit:
    """Least-squares fit of the model matching `curve.kind`.

    Amplitude and offset enter linearly and are solved exactly at every trial
    time constant; the simplex searches only tau (and the Ramsey detuning).
    """
    t, y = curve.times, curve.signal
    shape = shape or curve.shape
    if len(t) < 8:
        raise DecayFitError(f"need at least 8 samples, got {len(t)}")
    spread = float(np.ptp(y))
    if spread == 0 or spread <= 1e-12 * max(1.0, float(np.max(np.abs(y)))):
        raise DecayFitError("signal is constant: no decay present", residual=0.0)

    tau0 = _initial_tau(t, y)
    use_det = curve.kind == "ramsey"
    det0 = _initial_detuning(t, y) if use_det else 0.0
    span = float(t[-1] - t[0])

    # search in log tau (and detuning in units of 1/span) to keep the simplex well scaled
    def unpack(x):
        tau = math.exp(x[0]) * tau0
        det = x[1] / span if use_det else 0.0
        return tau, det

    def objective(x):
        tau, det = unpack(x)
        if not (1e-6 * tau0 < tau < 1e6 * tau0):
            return 1e300
        return _linear_fit(_basis(curve.kind, shape, t, tau, det), y)[1]

    start = [0.0, det0 * span] if use_det else [0.0]
    opts = options or MinimizeOptions(tolerance=1e-10, max_iterations=4000)
    res = minimize(objective, start, opts)
    tau, det = unpack(res.argmin)
    (amp, off), mse = _linear_fit(_basis(curve.kind, shape, t, tau, det), y)
    rms = math.sqrt(mse)

    if not res.converged:
        raise DecayFitError(f"fit did not converge (residual rms {rms:.3g})", residual=rms)
    if abs(amp) <= 1e-9 * max(1.0, abs(off)) or tau > 1e3 * span:
        raise DecayFitError(
            f"no decay resolved within the record (tau = {tau:.3g} s, residual rms {rms:.3g})",
            residual=rms,
        )
    return DecayFit(curve.kind, tau, float(amp), float(off), det if use_det else None, rms, True, shape)


@dataclass(frozen=True)
class CoherenceSet:
    """T1, T2*, T2 and the pure-dephasing times implied by them.

    A pure-dephasing time is ``math.inf`` when the matching T2 is lifetime
    limited, and None when that T2 was not supplied.
    """

    t1: float
    t2_star: Optional[float]
    t2_echo: Optional[float]
    tphi_star: Optional[float]
    tphi_echo: Optional[float]

    @property
    def lifetime_limited(self) -> bool:
        return any(x == math.inf for x in (self.tphi_star, self.tphi_echo))


def _tphi(t2, t1, slack, name):
    if t2 is None:
        return None
    if t2 <= 0:
        raise ValueError(f"{name} must be positive, got {t2}")
    if t2 > 2 * t1 * (1 + slack):
        raise ValueError(f"{name} = {t2:g} s exceeds 2*T1 = {2 * t1:g} s beyond the {slack:.0%} fit slack")
    rate = 1.0 / t2 - 1.0 / (2 * t1)
    if rate <= 1e-12 / t2:
        return math.inf
    return 1.0 / rate


def coherence_relations(
    t1: float, t2_star: Optional[float] = None, t2_echo: Optional[float] = None, slack: float = 0.05
) -> CoherenceSet:
    """Pure dephasing from 1/Tphi = 1/T2 - 1/(2 T1) for the Ramsey and echo T2."""
    if t1 <= 0:
        raise ValueError(f"T1 must be positive, got {t1}")
    return CoherenceSet(
        t1,
        t2_star,
        t2_echo,
        _tphi(t2_star, t1, slack, "T2*"),
        _tphi(t2_echo, t1, slack, "T2"),
    )


def t2_from_rates(t1: float, tphi: float) -> float:
    """T2 from T1 and pure dephasing (inverse of coherence_relations)."""
    return 1.0 / (1.0 / (2 * t1) + 1.0 / tphi)
