"""Dense numerical kernels shared by the physics modules.

The eigensolver and root finder are thin validated wrappers around LAPACK
(via numpy) and Brent's method (via scipy). The minimizer is a Nelder-Mead
simplex with optional seeded random restarts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import optimize


class NumericsError(ValueError):
    """Raised when a numeric kernel is handed input outside its contract."""


class NonHermitianError(NumericsError):
    pass


class BracketError(NumericsError):
    pass


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None


def check_hermitian(H: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Validate `H` as a square Hermitian matrix and return it as an ndarray."""
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise NumericsError(f"expected a square matrix, got shape {H.shape}")
    if H.shape[0] == 0:
        raise NumericsError("matrix dimension must be at least 1")
    if not np.all(np.isfinite(H)):
        raise NumericsError("matrix contains non-finite entries")
    scale = np.max(np.abs(H))
    dev = np.abs(H - H.conj().T)
    worst = np.unravel_index(np.argmax(dev), dev.shape)
    if dev[worst] > rtol * scale:
        i, j = (int(k) for k in worst)
        raise NonHermitianError(
            f"matrix is not Hermitian: |H[{i},{j}] - conj(H[{j},{i}])| = "
            f"{dev[worst]:.3e} exceeds {rtol:g} * max|H| = {rtol * scale:.3e} "
            f"(H[{i},{j}] = {H[i, j]}, H[{j},{i}] = {H[j, i]})"
        )
    return H


def eigensolve(H: np.ndarray, vectors: bool = True) -> EigenDecomposition:
    """Eigen-decomposition of a dense Hermitian matrix.

    Eigenvalues are returned in ascending order; eigenvector columns are
    aligned with them and orthonormal.
    """
    H = check_hermitian(H)
    # only the lower triangle is read by LAPACK; symmetrize to be safe
    H = 0.5 * (H + H.conj().T)
    if vectors:
        w, v = np.linalg.eigh(H)
        return EigenDecomposition(w, v)
    return EigenDecomposition(np.linalg.eigvalsh(H))


def real_symmetric_form(H: np.ndarray) -> np.ndarray:
    """Map complex Hermitian `H = A + iB` onto the real symmetric [[A, -B], [B, A]].

    Every eigenvalue of `H` appears twice in the spectrum of the result.
    """
    H = np.asarray(H, dtype=complex)
    A, B = H.real, H.imag
    return np.block([[A, -B], [B, A]])


@dataclass
class MinimizeOptions:
    tolerance: float = 1e-8
    max_iterations: int = 5000
    restarts: int = 0
    jitter: float = 0.1
    seed: int = 0


@dataclass
class MinimizeResult:
    argmin: np.ndarray
    value: float
    converged: bool
    iterations: int = 0
    evaluations: int = 0
    history: list = field(default_factory=list, repr=False)


class _NonFinite(Exception):
    pass


def _simplex_diameter(simplex: np.ndarray) -> float:
    return float(np.max(np.abs(simplex[1:] - simplex[0]))) if len(simplex) > 1 else 0.0


def minimize(
    objective: Callable[[np.ndarray], float],
    start: Sequence[float],
    options: Optional[MinimizeOptions] = None,
) -> MinimizeResult:
    """Derivative-free minimization (Nelder-Mead) with seeded restarts.

    Restart 0 begins at `start`; each further restart begins at the best point
    so far, multiplicatively jittered by up to ``options.jitter``. A restart
    that encounters a non-finite objective value is abandoned; the best finite
    point seen across all restarts is reported.
    """
    opts = options or MinimizeOptions()
    x0 = np.atleast_1d(np.asarray(start, dtype=float))
    f0 = float(objective(x0))
    if not np.isfinite(f0):
        raise NumericsError(f"objective is not finite at the start point (got {f0})")

    rng = np.random.default_rng(opts.seed)
    best_x, best_f = x0.copy(), f0
    converged = False
    iterations = 0
    evaluations = 1

    def tracked(x):
        nonlocal best_x, best_f, evaluations
        evaluations += 1
        fx = float(objective(x))
        if not np.isfinite(fx):
            raise _NonFinite
        if fx < best_f:
            best_x, best_f = np.array(x, dtype=float), fx
        return fx

    for k in range(opts.restarts + 1):
        if k == 0:
            xs = x0
        else:
            xs = best_x * (1 + opts.jitter * rng.uniform(-1, 1, size=best_x.shape))
            xs = np.where(best_x == 0, opts.jitter * rng.uniform(-1, 1, size=best_x.shape), xs)
        try:
            res = optimize.minimize(
                tracked,
                xs,
                method="Nelder-Mead",
                options={
                    "xatol": opts.tolerance,
                    "fatol": np.inf,
                    "maxiter": opts.max_iterations,
                    "maxfev": 4 * opts.max_iterations,
                },
            )
        except _NonFinite:
            continue
        iterations += int(res.nit)
        diameter = _simplex_diameter(res.final_simplex[0])
        converged = converged or (diameter < opts.tolerance and res.nit < opts.max_iterations)

    return MinimizeResult(best_x, best_f, converged, iterations, evaluations)


def find_root(f: Callable[[float], float], bracket: Sequence[float], tolerance: float = 1e-12) -> float:
    """Root of a scalar function on a sign-changing bracket (Brent's method)."""
    lo, hi = (float(b) for b in bracket)
    flo, fhi = float(f(lo)), float(f(hi))
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if not (np.isfinite(flo) and np.isfinite(fhi)) or flo * fhi > 0:
        raise BracketError(
            f"bracket [{lo:g}, {hi:g}] does not straddle a sign change: "
            f"f({lo:g}) = {flo:g}, f({hi:g}) = {fhi:g}"
        )
    return float(optimize.brentq(f, lo, hi, xtol=tolerance, rtol=4 * np.finfo(float).eps, maxiter=500))
