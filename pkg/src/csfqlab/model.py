"""Three-junction capacitively shunted flux qubit in the charge basis.

Coordinates are the gauge-invariant phases (phi1, phi2) across the two large
junctions; the small junction's phase is fixed by flux quantization. With
``E_J = I0 * Phi0 / 2pi`` the Hamiltonian is::

    H = 2 e^2 (n - ng)^T C^-1 (n - ng)
        + E_J [2 + alpha - cos(phi1) - cos(phi2) - alpha cos(2 pi f + phi1 - phi2)]

    C = [[Cj + Ca, -Ca], [-Ca, Cj + Ca]],   Ca = alpha * Cj + Cs

and is represented on Cooper-pair numbers n1, n2 in [-N, N].
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy import optimize

from csfqlab.constants import GHz, Phi0, e, fF, h
from csfqlab.numerics import eigensolve, find_root

DEFAULT_CUTOFF = 12
CONVERGENCE_TOL_HZ = 1e3


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class CavityParams:
    """Readout resonator; all frequencies are angular (rad/s)."""

    omega_cav: float
    g: float
    kappa: float
    Cqr: float = 0.0
    Cc: float = 0.0

    def __post_init__(self):
        if not self.omega_cav > 0:
            raise ModelError(f"omega_cav must be positive, got {self.omega_cav}")
        if not self.kappa > 0:
            raise ModelError(f"kappa must be positive, got {self.kappa}")
        if not self.g >= 0:
            raise ModelError(f"g must be non-negative, got {self.g}")

    @property
    def quality_factor(self) -> float:
        return self.omega_cav / self.kappa


@dataclass(frozen=True)
class DeviceParams:
    """Circuit parameters in SI units (A, F)."""

    I0: float
    alpha: float
    Cs: float
    Cj: float
    ng1: float = 0.0
    ng2: float = 0.0
    cavity: Optional[CavityParams] = None

    def __post_init__(self):
        if not self.I0 > 0:
            raise ModelError(f"I0 must be positive, got {self.I0}")
        if not 0 < self.alpha < 1:
            raise ModelError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.Cs > 0:
            raise ModelError(f"Cs must be positive, got {self.Cs}")
        if not self.Cj >= 0:
            raise ModelError(f"Cj must be non-negative, got {self.Cj}")

    @property
    def EJ(self) -> float:
        """Josephson energy of a large junction (J)."""
        return self.I0 * Phi0 / (2 * math.pi)

    @property
    def capacitance_matrix(self) -> np.ndarray:
        Ca = self.alpha * self.Cj + self.Cs
        return np.array([[self.Cj + Ca, -Ca], [-Ca, self.Cj + Ca]])

    def with_(self, **changes) -> "DeviceParams":
        return replace(self, **changes)


def shunt_charging_energy(params: DeviceParams) -> float:
    """e^2 / 2Cs in joules."""
    return e**2 / (2 * params.Cs)


@dataclass
class EnergySpectrum:
    flux: float
    levels: np.ndarray
    charge_cutoff: int
    converged: bool

    @property
    def omega01(self) -> float:
        """First transition frequency in Hz (not angular, despite the name)."""
        return float(self.levels[1])


@dataclass(frozen=True)
class Transition:
    i: int
    j: int
    freq: float
    order: int = 1

    @property
    def label(self) -> Tuple[int, int, int]:
        return (self.i, self.j, self.order)


@dataclass
class TransitionSet:
    entries: List[Transition] = field(default_factory=list)

    def __iter__(self) -> Iterator[Transition]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def find(self, i: int, j: int, order: int = 1) -> Optional[Transition]:
        for t in self.entries:
            if (t.i, t.j, t.order) == (i, j, order):
                return t
        return None


def _sparse_hamiltonian(params: DeviceParams, flux: float, N: int) -> sp.csr_matrix:
    if N < 2:
        raise ModelError(f"charge cutoff must be at least 2, got {N}")
    C = params.capacitance_matrix
    if abs(np.linalg.det(C)) <= 1e-12 * np.max(np.abs(C)) ** 2:
        raise ModelError("capacitance matrix is singular (Cj = 0 and Cs = 0?)")
    Cinv = np.linalg.inv(C)
    EJ, a = params.EJ, params.alpha
    d = 2 * N + 1
    n = np.arange(-N, N + 1, dtype=float)
    n1 = np.repeat(n, d) - params.ng1
    n2 = np.tile(n, d) - params.ng2
    kinetic = 2 * e**2 * (Cinv[0, 0] * n1**2 + 2 * Cinv[0, 1] * n1 * n2 + Cinv[1, 1] * n2**2)
    H = sp.diags(kinetic + EJ * (2 + a))

    # S raises the Cooper-pair number by one: e^{i phi}
    S = sp.diags(np.ones(d - 1), -1)
    eye = sp.identity(d)
    cos1 = sp.kron(S + S.T, eye)
    cos2 = sp.kron(eye, S + S.T)
    # e^{i(2 pi f + phi1 - phi2)}
    loop = np.exp(2j * np.pi * flux) * sp.kron(S, S.T)
    H = H - 0.5 * EJ * (cos1 + cos2) - 0.5 * a * EJ * (loop + loop.conj().T)
    return sp.csr_matrix(H)


def build_hamiltonian(params: DeviceParams, flux: float, charge_cutoff: int = DEFAULT_CUTOFF) -> np.ndarray:
    """Dense (2N+1)^2 Hamiltonian in joules; index k = (n1 + N)(2N+1) + (n2 + N)."""
    return _sparse_hamiltonian(params, flux, charge_cutoff).toarray()


@lru_cache(maxsize=16)
def _symmetry_blocks(N: int, with_inversion: bool) -> Tuple[sp.csc_matrix, ...]:
    """Isometries onto subspaces where H is real symmetric and block diagonal.

    With ng1 = ng2, H is invariant under the antiunitary swap (n1, n2) -> (n2, n1)
    combined with complex conjugation, which makes it real in the basis
    (|a> + |Xa>)/sqrt2, i(|a> - |Xa>)/sqrt2. With ng1 = ng2 = 0 the unitary
    (n1, n2) -> (-n2, -n1) additionally splits that real form into two blocks.
    """
    d = 2 * N + 1
    r2 = 1 / math.sqrt(2)

    def idx(i, j):
        return (i + N) * d + (j + N)

    rows, cols, vals = [], [], []
    col = 0
    for i in range(-N, N + 1):
        for j in range(i, N + 1):
            if i == j:
                rows.append(idx(i, i)); cols.append(col); vals.append(1.0)
                col += 1
            else:
                rows += [idx(i, j), idx(j, i)]; cols += [col, col]; vals += [r2, r2]
                col += 1
                rows += [idx(i, j), idx(j, i)]; cols += [col, col]; vals += [1j * r2, -1j * r2]
                col += 1
    U = sp.csr_matrix((np.array(vals, dtype=complex), (rows, cols)), shape=(d * d, d * d))
    if not with_inversion:
        return (U.tocsc(),)

    perm = np.empty(d * d, dtype=int)
    for i in range(-N, N + 1):
        for j in range(-N, N + 1):
            perm[idx(-j, -i)] = idx(i, j)
    Y = sp.csr_matrix((np.ones(d * d), (perm, np.arange(d * d))), shape=(d * d, d * d))
    # Y in the real basis is a signed permutation
    Yr = (U.conj().T @ Y @ U).tocoo()
    target, sign = {}, {}
    for r, c, v in zip(Yr.row, Yr.col, Yr.data):
        if abs(v) > 0.5:
            target[int(c)] = int(r)
            sign[int(c)] = 1.0 if v.real > 0 else -1.0

    even, odd, seen = [], [], set()
    for k in range(d * d):
        if k in seen:
            continue
        m, s = target[k], sign[k]
        if m == k:
            (even if s > 0 else odd).append(((k, 1.0),))
        else:
            even.append(((k, r2), (m, s * r2)))
            odd.append(((k, r2), (m, -s * r2)))
            seen.add(m)
        seen.add(k)

    def isometry(vectors):
        r, c, v = [], [], []
        for column, entries in enumerate(vectors):
            for k, val in entries:
                r.append(k); c.append(column); v.append(val)
        Q = sp.csr_matrix((v, (r, c)), shape=(d * d, len(vectors)))
        return (U @ Q).tocsc()

    return isometry(even), isometry(odd)


@lru_cache(maxsize=8)
def _projected_operators(N: int, ng_zero: bool) -> Tuple[dict, ...]:
    """Hamiltonian building blocks projected onto each symmetry block (dense)."""
    d = 2 * N + 1
    n = np.arange(-N, N + 1, dtype=float)
    n1 = np.repeat(n, d)
    n2 = np.tile(n, d)
    S = sp.diags(np.ones(d - 1), -1)
    eye = sp.identity(d)
    ops = {
        "n1n1": sp.diags(n1**2),
        "n1n2": sp.diags(n1 * n2),
        "n2n2": sp.diags(n2**2),
        "n1": sp.diags(n1),
        "n2": sp.diags(n2),
        "cos": sp.kron(S + S.T, eye) + sp.kron(eye, S + S.T),
        "loop": sp.kron(S, S.T),
    }
    out = []
    for W in _symmetry_blocks(N, ng_zero):
        Wh = W.conj().T
        out.append({k: np.asarray((Wh @ op @ W).todense()) for k, op in ops.items()})
    return tuple(out)


def _eigenenergies(params: DeviceParams, flux: float, N: int) -> np.ndarray:
    """All eigenvalues (J), ascending, using symmetry reduction when available."""
    if params.ng1 != params.ng2:
        return eigensolve(build_hamiltonian(params, flux, N), vectors=False).eigenvalues
    if N < 2:
        raise ModelError(f"charge cutoff must be at least 2, got {N}")
    C = params.capacitance_matrix
    if abs(np.linalg.det(C)) <= 1e-12 * np.max(np.abs(C)) ** 2:
        raise ModelError("capacitance matrix is singular (Cj = 0 and Cs = 0?)")
    c = 2 * e**2 * np.linalg.inv(C)
    g1, g2 = params.ng1, params.ng2
    EJ, a = params.EJ, params.alpha
    coef = {
        "n1n1": c[0, 0],
        "n1n2": 2 * c[0, 1],
        "n2n2": c[1, 1],
        "n1": -2 * c[0, 0] * g1 - 2 * c[0, 1] * g2,
        "n2": -2 * c[0, 1] * g1 - 2 * c[1, 1] * g2,
        "cos": -0.5 * EJ,
    }
    const = c[0, 0] * g1**2 + 2 * c[0, 1] * g1 * g2 + c[1, 1] * g2**2 + EJ * (2 + a)
    phase = -0.5 * a * EJ * np.exp(2j * np.pi * flux)
    parts = []
    for block in _projected_operators(N, g1 == 0):
        B = sum(v * block[k] for k, v in coef.items())
        loop = phase * block["loop"]
        B = (B + loop + loop.conj().T).real
        B[np.diag_indices_from(B)] += const
        parts.append(eigensolve(B, vectors=False).eigenvalues)
    return np.sort(np.concatenate(parts))


def relative_levels(params: DeviceParams, flux: float, n_levels: int, charge_cutoff: int = DEFAULT_CUTOFF) -> np.ndarray:
    """Lowest `n_levels` energies relative to the ground state, in Hz."""
    dim = (2 * charge_cutoff + 1) ** 2
    if not 1 <= n_levels <= dim:
        raise ModelError(f"n_levels must lie in [1, {dim}], got {n_levels}")
    w = _eigenenergies(params, flux, charge_cutoff)[:n_levels]
    return (w - w[0]) / h


def spectrum(
    params: DeviceParams,
    flux: float,
    n_levels: int = 5,
    charge_cutoff: int = DEFAULT_CUTOFF,
    check_convergence: bool = True,
) -> EnergySpectrum:
    """Energy levels at reduced flux `flux`, relative to the ground state (Hz).

    `converged` records whether the first transition moves by at most 1 kHz
    when the charge cutoff is raised by two.
    """
    levels = relative_levels(params, flux, n_levels, charge_cutoff)
    converged = False
    if check_convergence and n_levels >= 2:
        finer = relative_levels(params, flux, 2, charge_cutoff + 2)
        converged = abs(finer[1] - levels[1]) <= CONVERGENCE_TOL_HZ
    return EnergySpectrum(float(flux), levels, charge_cutoff, bool(converged))


def flux_sweep(
    params: DeviceParams,
    f_lo: float,
    f_hi: float,
    n_points: int,
    n_levels: int = 5,
    charge_cutoff: int = DEFAULT_CUTOFF,
    workers: Optional[int] = None,
    check_convergence: bool = True,
) -> List[EnergySpectrum]:
    if not f_lo < f_hi:
        raise ModelError(f"flux range must satisfy lo < hi, got [{f_lo}, {f_hi}]")
    if n_points < 2:
        raise ModelError(f"a sweep needs at least 2 points, got {n_points}")
    fluxes = np.linspace(f_lo, f_hi, n_points)

    def one(f):
        return spectrum(params, float(f), n_levels, charge_cutoff, check_convergence)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, fluxes))
    return [one(f) for f in fluxes]


def transitions(spec: EnergySpectrum, max_order: int = 1) -> TransitionSet:
    """Single-photon transitions between every pair of levels, plus m-photon
    transitions (2 <= m <= max_order) between levels at least two apart."""
    levels = np.asarray(spec.levels, dtype=float)
    if len(levels) < 2:
        raise ModelError("need at least two levels to form transitions")
    if max_order < 1:
        raise ModelError(f"max_order must be at least 1, got {max_order}")
    out = []
    for i in range(len(levels)):
        for j in range(i + 1, len(levels)):
            gap = levels[j] - levels[i]
            out.append(Transition(i, j, float(gap), 1))
            if j - i >= 2:
                for m in range(2, max_order + 1):
                    out.append(Transition(i, j, float(gap / m), m))
    return TransitionSet(out)


def ladder_spectrum(levels_hz: Sequence[float], flux: float = float("nan")) -> EnergySpectrum:
    """Wrap externally supplied levels (Hz, ground first) as a spectrum."""
    levels = np.asarray(levels_hz, dtype=float)
    return EnergySpectrum(flux, levels - levels[0], 0, True)


@dataclass(frozen=True)
class CjCalibration:
    """Outcome of tuning Cj so the sweet-spot transition hits a target.

    When the target is out of reach, `cj` is the value that comes closest and
    `reached` is False.
    """

    cj: float
    omega01: float
    target: float
    reached: bool


def calibrate_cj(
    params: DeviceParams,
    target: float = 5.01 * GHz,
    flux: float = 0.5,
    bounds: Tuple[float, float] = (0.1 * fF, 20 * fF),
    charge_cutoff: int = DEFAULT_CUTOFF,
    tolerance: float = 1e-22,
) -> CjCalibration:
    """One-dimensional calibration of the junction capacitance Cj."""

    def w01(cj):
        return float(relative_levels(params.with_(Cj=cj), flux, 2, charge_cutoff)[1])

    lo, hi = bounds
    # the map Cj -> omega01 is unimodal on the bounds: locate its peak first
    peak = optimize.minimize_scalar(
        lambda c: -w01(c * fF), bounds=(lo / fF, hi / fF), method="bounded", options={"xatol": 1e-9}
    )
    c_peak = float(peak.x) * fF
    w_peak = w01(c_peak)
    if w_peak < target:
        return CjCalibration(c_peak, w_peak, target, False)
    # prefer the smaller-Cj root if both sides straddle the target
    for a, b in ((lo, c_peak), (c_peak, hi)):
        if (w01(a) - target) * (w_peak - target) <= 0:
            cj = find_root(lambda c: w01(c) - target, (a, b), tolerance)
            return CjCalibration(cj, w01(cj), target, True)
    return CjCalibration(c_peak, w_peak, target, False)
