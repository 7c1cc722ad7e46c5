"""Rigid spacecraft on a stationary orbit around a uniformly rotating asteroid.

The state is the flat 12-vector z = (Pi, alpha, beta, gamma): angular
momentum of the spacecraft (body frame, kg m^2/s) followed by the three
attitude direction vectors. alpha, beta, gamma are the body-frame
coordinates of an orthonormal triad tied to the orbit (gamma points at
the asteroid, beta opposes the orbital angular momentum, alpha completes
the triad), so the six pairwise products <alpha,beta>, |alpha|^2, ... are
conserved and the motion lives on their joint level set.

Energy:

    H(z) = 1/2 <Pi, I^-1 Pi> + omega_t <Pi, beta>
           + k1 <alpha, I alpha> + k2 <beta, I beta> + k3 <gamma, I gamma>

with I = diag(i1, i2, i3) and k1, k2, k3 the gravity-gradient torque
coefficients. The module provides the dynamics, the chart-reduced energy
around the relative equilibrium, its closed-form 6x6 Hessian, the
three-inequality sufficient stability condition with the six-regime
classification, and the asteroid model feeding k1, k2, k3 from a
stationary-orbit radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geom
from .common import E1, E2, E3, Verdict
from .errors import InternalInconsistency
from .numerics import (
    Definiteness,
    DefinitenessClass,
    Trajectory,
    bracketed_roots,
    check_finite_states,
    classify_definiteness,
    fd_gradient,
    relative_drift,
)

# Slices of the flat state vector.
PI = slice(0, 3)
ALPHA = slice(3, 6)
BETA = slice(6, 9)
GAMMA = slice(9, 12)

INVARIANT_NAMES = ("H", "C11", "C12", "C13", "C22", "C23", "C33")

# Scan window for the stationary-orbit radius equation, in units of the
# synchronous radius (GM/omega_t^2)^(1/3).
ORBIT_SCAN_FACTOR = 10.0

REGIME_LABELS = ("i", "ii", "iii", "iv", "v", "vi")


@dataclass(frozen=True)
class AsteroidParams:
    """Gravity model of the central body.

    mass in kg, mean_radius in m, omega_t (spin rate) in rad/s, c20/c22
    dimensionless degree-2 harmonic coefficients, gravitational_constant
    in m^3 kg^-1 s^-2.
    """
    mass: float
    mean_radius: float
    omega_t: float
    c20: float
    c22: float
    gravitational_constant: float = 6.67384e-11

    def __post_init__(self):
        for name in ("mass", "mean_radius", "omega_t", "gravitational_constant"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be finite and positive, got {val!r}")
        for name in ("c20", "c22"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def gm(self) -> float:
        return self.gravitational_constant * self.mass


@dataclass(frozen=True)
class SpacecraftParams:
    """Principal inertia moments (kg m^2), asteroid spin rate (rad/s) and
    gravity-gradient coefficients (s^-2).

    k1, k2, k3 are stored as free constants; from_asteroid couples them to
    a gravity model at a chosen stationary-orbit radius.
    """
    i1: float
    i2: float
    i3: float
    omega_t: float
    k1: float
    k2: float
    k3: float

    def __post_init__(self):
        for name in ("i1", "i2", "i3"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be finite and positive, got {val!r}")
        for name in ("omega_t", "k1", "k2", "k3"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def inertia(self) -> np.ndarray:
        return np.array([self.i1, self.i2, self.i3])

    @classmethod
    def from_asteroid(cls, asteroid: AsteroidParams, inertia, orbit_radius: float
                      ) -> "SpacecraftParams":
        i1, i2, i3 = (float(v) for v in inertia)
        k1, k2, k3 = gravity_coefficients(asteroid, orbit_radius)
        return cls(i1=i1, i2=i2, i3=i3, omega_t=asteroid.omega_t, k1=k1, k2=k2, k3=k3)


@dataclass(frozen=True)
class OrbitRadius:
    """One positive root of the stationary-orbit equation.

    Infeasible roots (inside the asteroid's mean radius) are reported too,
    flagged, instead of being silently dropped.
    """
    radius: float
    feasible: bool


@dataclass(frozen=True)
class SpacecraftStabilityReport:
    equilibrium: np.ndarray
    critical_residual: float
    hessian: np.ndarray
    definiteness: Definiteness
    condition1: bool  # (i3 - i1)(k1 - k3) > 0
    condition2: bool  # (i2 - i1)(omega_t^2 - 2(k2 - k1)) > 0
    condition3: bool  # (i2 - i3)(omega_t^2 - 2(k2 - k3)) > 0
    verdict: Verdict
    regime: str | None


def state_vector(pi, alpha, beta, gamma) -> np.ndarray:
    """Pack the four blocks into the flat 12-vector."""
    return np.concatenate([np.asarray(b, dtype=float) for b in (pi, alpha, beta, gamma)])


def hamiltonian(z, params: SpacecraftParams) -> float:
    z = np.asarray(z, dtype=float)
    inertia = params.inertia
    pi = z[PI]
    alpha = z[ALPHA]
    beta = z[BETA]
    gamma = z[GAMMA]
    return float(0.5 * pi @ (pi / inertia)
                 + params.omega_t * (pi @ beta)
                 + params.k1 * (alpha @ (inertia * alpha))
                 + params.k2 * (beta @ (inertia * beta))
                 + params.k3 * (gamma @ (inertia * gamma)))


def grad_hamiltonian(z, params: SpacecraftParams) -> np.ndarray:
    """Analytic gradient, blocks (dH/dPi, dH/dalpha, dH/dbeta, dH/dgamma)."""
    z = np.asarray(z, dtype=float)
    inertia = params.inertia
    pi = z[PI]
    grad = np.empty(12)
    grad[PI] = pi / inertia + params.omega_t * z[BETA]
    grad[ALPHA] = 2.0 * params.k1 * inertia * z[ALPHA]
    grad[BETA] = params.omega_t * pi + 2.0 * params.k2 * inertia * z[BETA]
    grad[GAMMA] = 2.0 * params.k3 * inertia * z[GAMMA]
    return grad


def poisson_matrix(z) -> np.ndarray:
    """The degenerate antisymmetric structure matrix at z.

    First block row (hat Pi, hat alpha, hat beta, hat gamma); block rows
    2-4 carry the corresponding hat in the first block column and zeros
    elsewhere.
    """
    z = np.asarray(z, dtype=float)
    lam = np.zeros((12, 12))
    blocks = [geom.hat(z[s]) for s in (PI, ALPHA, BETA, GAMMA)]
    lam[0:3, 0:3] = blocks[0]
    for idx, blk in enumerate(blocks[1:], start=1):
        lam[0:3, 3 * idx:3 * idx + 3] = blk
        lam[3 * idx:3 * idx + 3, 0:3] = blk
    return lam


def vector_field(z, params: SpacecraftParams) -> np.ndarray:
    """Right-hand side zdot = Lambda(z) grad H(z), assembled blockwise."""
    z = np.asarray(z, dtype=float)
    grad = grad_hamiltonian(z, params)
    w = grad[PI]
    pi = z[PI]
    alpha = z[ALPHA]
    beta = z[BETA]
    gamma = z[GAMMA]
    out = np.empty(12)
    out[PI] = (np.cross(pi, w) + np.cross(alpha, grad[ALPHA])
               + np.cross(beta, grad[BETA]) + np.cross(gamma, grad[GAMMA]))
    out[ALPHA] = np.cross(alpha, w)
    out[BETA] = np.cross(beta, w)
    out[GAMMA] = np.cross(gamma, w)
    return out


def casimirs(z) -> np.ndarray:
    """(|alpha|^2, <alpha,beta>, <alpha,gamma>, |beta|^2, <beta,gamma>, |gamma|^2)."""
    z = np.asarray(z, dtype=float)
    alpha = z[ALPHA]
    beta = z[BETA]
    gamma = z[GAMMA]
    return np.array([alpha @ alpha, alpha @ beta, alpha @ gamma,
                     beta @ beta, beta @ gamma, gamma @ gamma])


def equilibrium(params: SpacecraftParams) -> np.ndarray:
    """Relative equilibrium: Pi = -omega_t i2 j, frame aligned with (i, j, k)."""
    return state_vector(np.array([0.0, -params.omega_t * params.i2, 0.0]), E1, E2, E3)


def chart_state(pi, p) -> np.ndarray:
    """Point of the equilibrium's leaf addressed by chart coordinates (Pi, p)."""
    alpha, beta, gamma = geom.rotate_frame(p, E1, E2, E3)
    return state_vector(pi, alpha, beta, gamma)


def reduced_hamiltonian(pi, p, params: SpacecraftParams) -> float:
    """Energy restricted to the leaf, in chart coordinates (Pi, p)."""
    return hamiltonian(chart_state(pi, p), params)


def reduced_hessian(params: SpacecraftParams) -> np.ndarray:
    """Closed-form Hessian of the reduced energy at the equilibrium.

    Coordinate order (Pi1, Pi2, Pi3, p1, p2, p3). Nonzero pattern: the
    diagonal, plus the couplings (Pi1, p3) = -2 omega_t and
    (Pi3, p1) = +2 omega_t.
    """
    i1, i2, i3 = params.i1, params.i2, params.i3
    w = params.omega_t
    k1, k2, k3 = params.k1, params.k2, params.k3
    h44 = 4.0 * (w * w * i2 + 2.0 * (i3 - i2) * (k2 - k3))
    h55 = 8.0 * (i3 - i1) * (k1 - k3)
    h66 = 4.0 * (w * w * i2 + 2.0 * (i1 - i2) * (k2 - k1))
    hess = np.diag([1.0 / i1, 1.0 / i2, 1.0 / i3, h44, h55, h66])
    hess[0, 5] = hess[5, 0] = -2.0 * w
    hess[2, 3] = hess[3, 2] = 2.0 * w
    return hess


def three_conditions(params: SpacecraftParams) -> tuple[bool, bool, bool]:
    """The three sufficient-stability inequalities, evaluated strictly."""
    i1, i2, i3 = params.i1, params.i2, params.i3
    w2 = params.omega_t ** 2
    k1, k2, k3 = params.k1, params.k2, params.k3
    return ((i3 - i1) * (k1 - k3) > 0.0,
            (i2 - i1) * (w2 - 2.0 * (k2 - k1)) > 0.0,
            (i2 - i3) * (w2 - 2.0 * (k2 - k3)) > 0.0)


def classify_regime(params: SpacecraftParams) -> str | None:
    """Label (i)-(vi) when the strict inertia ordering and the k / omega_t
    pattern of one of the six stable regimes holds; None otherwise."""
    i1, i2, i3 = params.i1, params.i2, params.i3
    w2 = params.omega_t ** 2
    k1, k2, k3 = params.k1, params.k2, params.k3
    d21 = 2.0 * (k2 - k1)
    d23 = 2.0 * (k2 - k3)
    patterns = (
        (i2 > i3 > i1 and k1 > k3 and w2 > d23),
        (i3 > i2 > i1 and k1 > k3 and d21 < w2 < d23),
        (i3 > i1 > i2 and k1 > k3 and w2 < d21),
        (i2 > i1 > i3 and k1 < k3 and w2 > d21),
        (i1 > i2 > i3 and k1 < k3 and d23 < w2 < d21),
        (i1 > i3 > i2 and k1 < k3 and w2 < d23),
    )
    for label, match in zip(REGIME_LABELS, patterns):
        if match:
            return label
    return None


def stability_analysis(params: SpacecraftParams) -> SpacecraftStabilityReport:
    """Sufficient-condition verdict for the relative equilibrium.

    The three inequalities and the definiteness of the closed-form Hessian
    are computed independently and cross-checked; a disagreement that is
    not attributable to a Marginal eigenvalue raises InternalInconsistency.
    The verdict is StableSufficient only when both agree on positive
    definiteness, so Marginal borderline cases come back Inconclusive.
    """
    z_eq = equilibrium(params)
    pi_eq = z_eq[PI]
    residual = float(np.sqrt(np.sum(
        fd_gradient(lambda x: reduced_hamiltonian(x[:3], x[3:], params),
                    np.concatenate([pi_eq, np.zeros(3)])) ** 2)))
    hess = reduced_hessian(params)
    definiteness = classify_definiteness(hess)
    c1, c2, c3 = three_conditions(params)
    conditions_hold = c1 and c2 and c3
    positive = definiteness.classification is DefinitenessClass.POSITIVE_DEFINITE
    if conditions_hold != positive and \
            definiteness.classification is not DefinitenessClass.MARGINAL:
        raise InternalInconsistency(
            f"three inequalities ({c1}, {c2}, {c3}) disagree with Hessian "
            f"definiteness {definiteness.classification.value}")
    verdict = Verdict.STABLE_SUFFICIENT if (conditions_hold and positive) \
        else Verdict.INCONCLUSIVE
    return SpacecraftStabilityReport(
        equilibrium=z_eq,
        critical_residual=residual,
        hessian=hess,
        definiteness=definiteness,
        condition1=c1,
        condition2=c2,
        condition3=c3,
        verdict=verdict,
        regime=classify_regime(params),
    )


def orbit_equation(asteroid: AsteroidParams):
    """Residual function of the stationary-orbit radius equation.

    Scaled by omega_t^2 relative to the textbook form, i.e.

        f(r) = omega_t^2 r^5 - GM (r^2 - 3/2 a_e^2 c20 - 9 a_e^2 c22),

    which keeps the residual magnitudes near double-precision roundoff of
    GM-sized terms instead of r^5-sized ones. Roots are unchanged.
    """
    gm = asteroid.gm
    w2 = asteroid.omega_t ** 2
    const = (-1.5 * asteroid.mean_radius ** 2 * asteroid.c20
             - 9.0 * asteroid.mean_radius ** 2 * asteroid.c22)

    def f(r: float) -> float:
        return w2 * r ** 5 - gm * (r * r + const)

    return f


def stationary_orbit_radii(asteroid: AsteroidParams,
                           n_scan: int = 2000) -> tuple[OrbitRadius, ...]:
    """Positive stationary-orbit radii with feasibility flags.

    Scans (0, 10 (GM/omega_t^2)^(1/3)]; a root is feasible when it clears
    the asteroid's mean radius.
    """
    synchronous = (asteroid.gm / asteroid.omega_t ** 2) ** (1.0 / 3.0)
    roots = bracketed_roots(orbit_equation(asteroid), 0.0,
                            ORBIT_SCAN_FACTOR * synchronous, n_scan=n_scan)
    return tuple(OrbitRadius(radius=float(r), feasible=bool(r >= asteroid.mean_radius))
                 for r in roots if r > 0.0)


def gravity_coefficients(asteroid: AsteroidParams, orbit_radius: float
                         ) -> tuple[float, float, float]:
    """Gravity-gradient coefficients (k1, k2, k3) at a stationary-orbit radius."""
    if orbit_radius <= 0:
        raise ValueError("orbit_radius must be positive")
    gm = asteroid.gm
    ae2 = asteroid.mean_radius ** 2
    r3 = orbit_radius ** 3
    r5 = orbit_radius ** 5
    k1 = 3.0 * gm * ae2 * asteroid.c22 / r5
    k2 = 3.0 * gm * ae2 * asteroid.c20 / (2.0 * r5)
    k3 = 3.0 * gm / (2.0 * r3) \
        - 3.0 * gm * ae2 / (4.0 * r5) * (5.0 * asteroid.c20 + 34.0 * asteroid.c22)
    return k1, k2, k3


def harmonic_coefficients(iu: float, iv: float, iw: float, mass: float,
                          mean_radius: float) -> tuple[float, float]:
    """Degree-2 harmonic coefficients from the body's principal moments."""
    if mass <= 0 or mean_radius <= 0:
        raise ValueError("mass and mean_radius must be positive")
    denom = mass * mean_radius ** 2
    c20 = -(2.0 * iw - iu - iv) / (2.0 * denom)
    c22 = (iv - iu) / (4.0 * denom)
    return c20, c22


def castalia_preset() -> AsteroidParams:
    """Physical data of asteroid 4769 Castalia."""
    return AsteroidParams(
        mass=1.4091e12,
        mean_radius=543.1,
        omega_t=4.2882e-4,
        c20=-7.257e-2,
        c22=2.984e-2,
        gravitational_constant=6.67384e-11,
    )


def invariant_series(states: np.ndarray, params: SpacecraftParams) -> np.ndarray:
    """Columns H, C11, C12, C13, C22, C23, C33 evaluated over a state array."""
    states = np.atleast_2d(np.asarray(states, dtype=float))
    pi = states[:, PI]
    alpha = states[:, ALPHA]
    beta = states[:, BETA]
    gamma = states[:, GAMMA]
    inertia = params.inertia
    h = (0.5 * np.sum(pi * pi / inertia, axis=1)
         + params.omega_t * np.sum(pi * beta, axis=1)
         + params.k1 * np.sum(alpha * alpha * inertia, axis=1)
         + params.k2 * np.sum(beta * beta * inertia, axis=1)
         + params.k3 * np.sum(gamma * gamma * inertia, axis=1))
    cols = [h,
            np.sum(alpha * alpha, axis=1), np.sum(alpha * beta, axis=1),
            np.sum(alpha * gamma, axis=1), np.sum(beta * beta, axis=1),
            np.sum(beta * gamma, axis=1), np.sum(gamma * gamma, axis=1)]
    return np.column_stack(cols)


def simulate(params: SpacecraftParams, z0, dt: float, steps: int) -> Trajectory:
    """Long fixed-step RK4 run with drift monitoring of H and the six
    conserved frame products (drift order matches INVARIANT_NAMES).

    Same recurrence as numerics.rk4_integrate, driven by a compiled kernel
    so that 10^5-step conservation checks stay cheap.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    from . import _kernels  # deferred: pulls in numba

    par = np.array([params.i1, params.i2, params.i3, params.omega_t,
                    params.k1, params.k2, params.k3])
    states = _kernels.spacecraft_rk4(np.asarray(z0, dtype=float).copy(), par,
                                     float(dt), int(steps))
    check_finite_states(states)
    series = invariant_series(states, params)
    drifts = tuple(relative_drift(series[:, j]) for j in range(series.shape[1]))
    return Trajectory(times=np.arange(steps + 1) * dt, states=states, drifts=drifts)
