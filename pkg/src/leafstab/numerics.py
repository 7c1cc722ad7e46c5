"""Generic numerical kernels and independent verification oracles.

Everything here is deliberately self-contained (cyclic Jacobi instead of
LAPACK, scan-and-bisect instead of a library root finder) so that the
closed-form results elsewhere in the package are checked against code
that shares nothing with them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .errors import ConvergenceError, NonFiniteState

EPS = float(np.finfo(float).eps)

# Standard truncation/rounding balance for central first and second
# differences of a smooth function.
GRAD_STEP = EPS ** (1.0 / 3.0)
HESS_STEP = EPS ** 0.25

# Relative eigenvalue threshold below which definiteness is reported as
# Marginal instead of being silently classified.
DEFINITENESS_EPS = 1e-10

MAX_JACOBI_SWEEPS = 100
MAX_MATRIX_DIM = 12


class DefinitenessClass(Enum):
    POSITIVE_DEFINITE = "PositiveDefinite"
    NEGATIVE_DEFINITE = "NegativeDefinite"
    INDEFINITE = "Indefinite"
    MARGINAL = "Marginal"


@dataclass(frozen=True)
class Definiteness:
    """Definiteness class of a symmetric matrix plus its extreme eigenvalues."""
    classification: DefinitenessClass
    min_eigenvalue: float
    max_eigenvalue: float


@dataclass(frozen=True)
class Trajectory:
    """Fixed-step integration record.

    times has shape (steps + 1,), states (steps + 1, dim). drifts holds,
    for each monitored invariant g in input order,
    max_t |g(x_t) - g(x_0)| / max(1, |g(x_0)|).
    """
    times: np.ndarray
    states: np.ndarray
    drifts: tuple[float, ...]


def symmetrize(a) -> np.ndarray:
    """(a + a^T) / 2; the result equals its own transpose exactly."""
    a = np.asarray(a, dtype=float)
    return (a + a.T) / 2.0


def sym_eigenvalues(s, max_sweeps: int = MAX_JACOBI_SWEEPS) -> np.ndarray:
    """Eigenvalues of a small symmetric matrix, ascending, by cyclic Jacobi.

    Sweeps stop once the off-diagonal Frobenius norm falls below
    1e-13 * ||s||_F. Raises ConvergenceError after max_sweeps sweeps,
    which does not happen for the dimensions this library uses.
    """
    a = symmetrize(s).copy()
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if n > MAX_MATRIX_DIM:
        raise ValueError(f"dimension {n} exceeds supported maximum {MAX_MATRIX_DIM}")
    norm = float(np.sqrt(np.sum(a * a)))
    if norm == 0.0:
        return np.zeros(n)
    threshold = 1e-13 * norm

    def off_norm() -> float:
        # Summed directly over the off-diagonal entries; the subtraction
        # ||A||^2 - ||diag||^2 would drown the answer in cancellation noise.
        mask = ~np.eye(n, dtype=bool)
        return float(np.sqrt(np.sum(a[mask] ** 2)))

    for _ in range(max_sweeps):
        if off_norm() <= threshold:
            return np.sort(np.diag(a))
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                # Classic two-sided rotation choosing the smaller angle.
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                sn = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - sn * col_q
                a[:, q] = sn * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - sn * row_q
                a[q, :] = sn * row_p + c * row_q
    residual = off_norm()
    if residual <= threshold:
        return np.sort(np.diag(a))
    raise ConvergenceError(
        f"Jacobi iteration did not reach off-diagonal norm {threshold:g} "
        f"after {max_sweeps} sweeps (residual {residual:g})")


def classify_definiteness(s) -> Definiteness:
    """Classify a symmetric matrix by the signs of its eigenvalues.

    Eigenvalues within DEFINITENESS_EPS * max(1, |lambda|_max) of zero make
    the result Marginal rather than forcing a strict class.
    """
    eigs = sym_eigenvalues(s)
    lam_min = float(eigs[0])
    lam_max = float(eigs[-1])
    thr = DEFINITENESS_EPS * max(1.0, float(np.max(np.abs(eigs))))
    if lam_min > thr:
        cls = DefinitenessClass.POSITIVE_DEFINITE
    elif lam_max < -thr:
        cls = DefinitenessClass.NEGATIVE_DEFINITE
    elif bool(np.any(np.abs(eigs) <= thr)):
        cls = DefinitenessClass.MARGINAL
    else:
        cls = DefinitenessClass.INDEFINITE
    return Definiteness(cls, lam_min, lam_max)


def bracketed_roots(f: Callable[[float], float], lo: float, hi: float,
                    n_scan: int = 2000, f_floor: float = 0.0) -> np.ndarray:
    """All sign-change roots of f on [lo, hi], ascending.

    Scans n_scan uniform cells for sign changes and bisects each bracket
    to relative width 1e-12. A root landing exactly on a scan node is
    detected through |f(node)| <= f_floor. Returns an empty array when no
    sign change is found.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    if n_scan < 2:
        raise ValueError("need n_scan >= 2")
    nodes = np.linspace(lo, hi, n_scan + 1)
    values = np.array([f(float(x)) for x in nodes])

    roots: list[float] = []
    for x, fx in zip(nodes, values):
        if abs(fx) <= f_floor:
            roots.append(float(x))
    for i in range(n_scan):
        a, b = float(nodes[i]), float(nodes[i + 1])
        fa, fb = float(values[i]), float(values[i + 1])
        if abs(fa) <= f_floor or abs(fb) <= f_floor:
            continue
        if fa * fb >= 0.0:
            continue
        for _ in range(200):
            if (b - a) <= 1e-12 * max(abs(a), abs(b)):
                break
            mid = 0.5 * (a + b)
            fm = f(mid)
            if fm == 0.0:
                a = b = mid
                break
            if fa * fm < 0.0:
                b = mid
            else:
                a, fa = mid, fm
        roots.append(0.5 * (a + b))
    return np.array(sorted(roots))


def fd_gradient(f: Callable[[np.ndarray], float], x) -> np.ndarray:
    """Central-difference gradient with per-coordinate step cbrt(eps) * max(1, |x_i|)."""
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for i in range(x.size):
        h = GRAD_STEP * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        grad[i] = (f(xp) - f(xm)) / (2.0 * h)
    return grad


def fd_hessian(f: Callable[[np.ndarray], float], x) -> np.ndarray:
    """Central second-difference Hessian, symmetrized by averaging.

    Per-coordinate step eps^(1/4) * max(1, |x_i|).
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    h = np.array([HESS_STEP * max(1.0, abs(x[i])) for i in range(n)])
    f0 = f(x)
    hess = np.empty((n, n))

    def at(*shifts) -> float:
        xs = x.copy()
        for i, s in shifts:
            xs[i] += s
        return f(xs)

    for i in range(n):
        hess[i, i] = (at((i, h[i])) - 2.0 * f0 + at((i, -h[i]))) / (h[i] * h[i])
        for j in range(i + 1, n):
            val = (at((i, h[i]), (j, h[j])) - at((i, h[i]), (j, -h[j]))
                   - at((i, -h[i]), (j, h[j])) + at((i, -h[i]), (j, -h[j])))
            hess[i, j] = hess[j, i] = val / (4.0 * h[i] * h[j])
    return symmetrize(hess)


def rk4_integrate(field: Callable[[np.ndarray], np.ndarray], x0, dt: float,
                  steps: int,
                  invariants: Sequence[Callable[[np.ndarray], float]] = ()) -> Trajectory:
    """Classic fixed-step RK4 with conserved-quantity monitoring.

    Conservation is monitored, never enforced: the reported drifts are
    themselves a quality metric of the integration. Raises NonFiniteState
    (with the offending step index) if any component stops being finite.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    x = np.asarray(x0, dtype=float).copy()
    states = np.empty((steps + 1, x.size))
    states[0] = x
    for i in range(steps):
        k1 = np.asarray(field(x), dtype=float)
        k2 = np.asarray(field(x + 0.5 * dt * k1), dtype=float)
        k3 = np.asarray(field(x + 0.5 * dt * k2), dtype=float)
        k4 = np.asarray(field(x + dt * k3), dtype=float)
        x = x + dt / 6.0 * (k1 + 2.0 * (k2 + k3) + k4)
        states[i + 1] = x
    check_finite_states(states)
    times = np.arange(steps + 1) * dt
    return Trajectory(times=times, states=states, drifts=drifts_of(states, invariants))


def check_finite_states(states: np.ndarray) -> None:
    """Raise NonFiniteState at the first row containing inf or nan."""
    finite_rows = np.isfinite(states).all(axis=1)
    if not finite_rows.all():
        raise NonFiniteState(step=int(np.argmin(finite_rows)))


def drifts_of(states: np.ndarray,
              invariants: Sequence[Callable[[np.ndarray], float]]) -> tuple[float, ...]:
    """Max relative drift of each invariant over a recorded trajectory."""
    out = []
    for g in invariants:
        vals = np.array([g(s) for s in states])
        out.append(float(np.max(np.abs(vals - vals[0])) / max(1.0, abs(vals[0]))))
    return tuple(out)


def relative_drift(vals: np.ndarray) -> float:
    """max |v_t - v_0| / max(1, |v_0|) for an already-evaluated invariant."""
    return float(np.max(np.abs(vals - vals[0])) / max(1.0, abs(float(vals[0]))))
