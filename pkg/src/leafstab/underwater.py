"""Neutrally buoyant submerged rigid vehicle with added-mass coupling.

The state is the flat 9-vector u = (Pi, Q, Gamma): angular impulse,
linear impulse, and the gravity direction, all in the body frame with
origin at the center of buoyancy. Impulses and velocities are related
through the 6x6 block matrix (J, D; D^T, M) built from the body and
added-mass inertias; its closed-form inverse (A, B^T; B, C) carries the
whole kinetic energy:

    H(u) = 1/2 (<Pi, A Pi> + 2 <Pi, B^T Q> + <Q, C Q> - 2 m g l <Gamma, r>)

The vehicle is bottom-heavy along the third body axis (r = e3, offset l
from buoyancy to gravity center); the third axis is a principal axis
while the first two need not be, so J has the single off-diagonal entry
I12. The module provides the dynamics, the block inverse with its
admissibility inequalities, the horizontal-translation equilibrium
family, the closed-form reduced Hessian and determinant, and the
four-condition stability verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geom
from .common import E3, Verdict
from .errors import AdmissibilityError, DegenerateEquilibrium, InternalInconsistency
from .numerics import (
    Definiteness,
    DefinitenessClass,
    Trajectory,
    check_finite_states,
    classify_definiteness,
    fd_gradient,
    relative_drift,
)

PI = slice(0, 3)
Q = slice(3, 6)
GAMMA = slice(6, 9)

INVARIANT_NAMES = ("H", "C11", "C12", "C22")


@dataclass(frozen=True)
class VehicleParams:
    """Mass/buoyancy geometry and combined (body + added) kinetic matrices.

    m: vehicle mass (kg); g: gravitational acceleration (m/s^2); l >= 0:
    distance from center of buoyancy to center of gravity along +e3 (m);
    m1, m2, m3: diagonal of M (kg); i11, i12, i22, i3: entries of J
    (kg m^2) with the third axis principal. The added-mass contributions
    are already summed into m1..m3 and the J entries.

    Only basic field constraints are enforced here; the physical and
    block-positivity inequalities are the business of admissibility().
    """
    m: float
    g: float
    l: float
    m1: float
    m2: float
    m3: float
    i11: float
    i12: float
    i22: float
    i3: float

    def __post_init__(self):
        for name in ("m", "g", "m1", "m2", "m3"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be finite and positive, got {val!r}")
        if not (math.isfinite(self.l) and self.l >= 0):
            raise ValueError(f"l must be finite and nonnegative, got {self.l!r}")
        for name in ("i11", "i12", "i22", "i3"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def mgl(self) -> float:
        return self.m * self.g * self.l


@dataclass(frozen=True)
class BlockKinetic:
    """Closed-form inverse (A, B^T; B, C) of the impulse-velocity block,
    with its scalar denominator k."""
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    k: float


@dataclass(frozen=True)
class AdmissibilityReport:
    """Truth values of the admissibility inequalities, reported separately:
    seven physical ones and the three that make the kinetic block
    positive definite."""
    m1_positive: bool
    m2_positive: bool
    m3_positive: bool
    i11_positive: bool
    i22_positive: bool
    planar_det_positive: bool  # i11 i22 - i12^2 > 0
    i3_positive: bool
    m1_i22_exceeds_ml2: bool   # m1 i22 > m^2 l^2
    m2_i11_exceeds_ml2: bool   # m2 i11 > m^2 l^2
    k_positive: bool

    @property
    def physical_ok(self) -> bool:
        return (self.m1_positive and self.m2_positive and self.m3_positive
                and self.i11_positive and self.i22_positive
                and self.planar_det_positive and self.i3_positive)

    @property
    def block_ok(self) -> bool:
        return self.m1_i22_exceeds_ml2 and self.m2_i11_exceeds_ml2 and self.k_positive

    @property
    def admissible(self) -> bool:
        return self.physical_ok and self.block_ok


@dataclass(frozen=True)
class UnderwaterStabilityReport:
    equilibrium: np.ndarray
    critical_residual: float
    hessian: np.ndarray
    determinant_closed_form: float
    definiteness: Definiteness
    condition_nonzero_q2: bool    # Q2 != 0
    condition_bottom_heavy: bool  # l > 0
    condition_mgl_margin: bool    # m g l > (1/m2 - 1/m3) Q2^2
    condition_mass_order: bool    # m2 > m1
    verdict: Verdict


def state_vector(pi, q, gamma) -> np.ndarray:
    return np.concatenate([np.asarray(b, dtype=float) for b in (pi, q, gamma)])


def kinetic_scalar(v: VehicleParams) -> float:
    """Denominator k of the closed-form block inverse."""
    ml2 = (v.m * v.l) ** 2
    return (v.m1 * v.m2 * (v.i11 * v.i22 - v.i12 ** 2)
            - ml2 * (v.m1 * v.i22 + v.m2 * v.i11) + ml2 * ml2)


def admissibility(v: VehicleParams) -> AdmissibilityReport:
    ml2 = (v.m * v.l) ** 2
    return AdmissibilityReport(
        m1_positive=v.m1 > 0.0,
        m2_positive=v.m2 > 0.0,
        m3_positive=v.m3 > 0.0,
        i11_positive=v.i11 > 0.0,
        i22_positive=v.i22 > 0.0,
        planar_det_positive=v.i11 * v.i22 - v.i12 ** 2 > 0.0,
        i3_positive=v.i3 > 0.0,
        m1_i22_exceeds_ml2=v.m1 * v.i22 > ml2,
        m2_i11_exceeds_ml2=v.m2 * v.i11 > ml2,
        k_positive=kinetic_scalar(v) > 0.0,
    )


def require_admissible(v: VehicleParams) -> None:
    report = admissibility(v)
    if not report.admissible:
        failed = [name for name in (
            "m1_positive", "m2_positive", "m3_positive", "i11_positive",
            "i22_positive", "planar_det_positive", "i3_positive",
            "m1_i22_exceeds_ml2", "m2_i11_exceeds_ml2", "k_positive")
            if not getattr(report, name)]
        raise AdmissibilityError(f"vehicle parameters inadmissible: {', '.join(failed)}")


def mass_matrices(v: VehicleParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(M, J, D) with M = diag(m1, m2, m3), J third-axis principal and
    D = m l hat(e3)."""
    require_admissible(v)
    m_mat = np.diag([v.m1, v.m2, v.m3])
    j_mat = np.array([[v.i11, v.i12, 0.0],
                      [v.i12, v.i22, 0.0],
                      [0.0, 0.0, v.i3]])
    d_mat = v.m * v.l * geom.hat(E3)
    return m_mat, j_mat, d_mat


def kinetic_inverse(v: VehicleParams) -> BlockKinetic:
    """Closed-form (A, B^T; B, C) = (J, D; D^T, M)^-1.

    The diagonal entries of B carry the factor m*l (they vanish with the
    buoyancy offset, as the block-diagonal limit requires); the assembled
    inverse is validated against dense inversion in the test suite.
    """
    require_admissible(v)
    k = kinetic_scalar(v)
    ml = v.m * v.l
    ml2 = ml * ml
    a = np.array([
        [v.m2 * (v.m1 * v.i22 - ml2) / k, -v.m1 * v.m2 * v.i12 / k, 0.0],
        [-v.m1 * v.m2 * v.i12 / k, v.m1 * (v.m2 * v.i11 - ml2) / k, 0.0],
        [0.0, 0.0, 1.0 / v.i3]])
    b = np.array([
        [v.m2 * ml * v.i12 / k, -(v.m2 * v.i11 - ml2) * ml / k, 0.0],
        [(v.m1 * v.i22 - ml2) * ml / k, -v.m1 * ml * v.i12 / k, 0.0],
        [0.0, 0.0, 0.0]])
    planar = v.i11 * v.i22 - v.i12 ** 2
    c = np.array([
        [(v.m2 * planar - ml2 * v.i22) / k, ml2 * v.i12 / k, 0.0],
        [ml2 * v.i12 / k, (v.m1 * planar - ml2 * v.i11) / k, 0.0],
        [0.0, 0.0, 1.0 / v.m3]])
    return BlockKinetic(a=a, b=b, c=c, k=k)


def velocities(u, v: VehicleParams) -> tuple[np.ndarray, np.ndarray]:
    """(Omega, vel) = (A, B^T; B, C) (Pi, Q)."""
    u = np.asarray(u, dtype=float)
    kin = kinetic_inverse(v)
    pi = u[PI]
    q = u[Q]
    return kin.a @ pi + kin.b.T @ q, kin.b @ pi + kin.c @ q


def hamiltonian(u, v: VehicleParams) -> float:
    u = np.asarray(u, dtype=float)
    kin = kinetic_inverse(v)
    pi = u[PI]
    q = u[Q]
    return float(0.5 * (pi @ (kin.a @ pi) + 2.0 * pi @ (kin.b.T @ q)
                        + q @ (kin.c @ q) - 2.0 * v.mgl * (u[GAMMA] @ E3)))


def casimirs(u) -> np.ndarray:
    """(|Q|^2, <Q, Gamma>, |Gamma|^2)."""
    u = np.asarray(u, dtype=float)
    q = u[Q]
    gamma = u[GAMMA]
    return np.array([q @ q, q @ gamma, gamma @ gamma])


def vector_field(u, v: VehicleParams, r=None) -> np.ndarray:
    """Kirchhoff-type right-hand side.

        Pi'    = Pi x Omega + Q x vel - m g l Gamma x r
        Q'     = Q x Omega
        Gamma' = Gamma x Omega

    r defaults to e3 (the bottom-heavy configuration the stability theory
    assumes); the dynamics itself accepts any unit offset direction.
    """
    u = np.asarray(u, dtype=float)
    r = E3 if r is None else np.asarray(r, dtype=float)
    omega, vel = velocities(u, v)
    pi = u[PI]
    q = u[Q]
    gamma = u[GAMMA]
    out = np.empty(9)
    out[PI] = np.cross(pi, omega) + np.cross(q, vel) - v.mgl * np.cross(gamma, r)
    out[Q] = np.cross(q, omega)
    out[GAMMA] = np.cross(gamma, omega)
    return out


def equilibrium(q2e: float, v: VehicleParams) -> np.ndarray:
    """Steady horizontal translation with no spin:
    Pi = (-(m l / m2) Q2, 0, 0), Q = (0, Q2, 0), Gamma = e3."""
    if q2e == 0.0:
        raise DegenerateEquilibrium("Q2 must be nonzero for the generic family")
    return state_vector(
        np.array([-(v.m * v.l / v.m2) * q2e, 0.0, 0.0]),
        np.array([0.0, q2e, 0.0]),
        E3,
    )


def chart_state(pi, p, q2e: float, v: VehicleParams) -> np.ndarray:
    """Point of the equilibrium's leaf addressed by chart coordinates (Pi, p)."""
    u_eq = equilibrium(q2e, v)
    rot = geom.rotation_from_quaternion(geom.ball_to_sphere(p))
    return state_vector(pi, rot @ u_eq[Q], rot @ u_eq[GAMMA])


def reduced_hamiltonian(pi, p, q2e: float, v: VehicleParams) -> float:
    """Energy restricted to the equilibrium's leaf, chart coordinates (Pi, p)."""
    return hamiltonian(chart_state(pi, p, q2e, v), v)


def reduced_hessian(q2e: float, v: VehicleParams) -> np.ndarray:
    """Closed-form Hessian of the reduced energy at the equilibrium,
    coordinate order (Pi1, Pi2, Pi3, p1, p2, p3).

    All entries outside the listed pattern vanish; the finite-difference
    oracle in the test suite certifies both the pattern and the values.
    """
    require_admissible(v)
    if q2e == 0.0:
        raise DegenerateEquilibrium("Q2 must be nonzero for the generic family")
    k = kinetic_scalar(v)
    ml = v.m * v.l
    ml2 = ml * ml
    planar = v.i11 * v.i22 - v.i12 ** 2
    hess = np.zeros((6, 6))
    hess[0, 0] = v.m2 * (v.m1 * v.i22 - ml2) / k
    hess[0, 1] = hess[1, 0] = -v.m1 * v.m2 * v.i12 / k
    hess[0, 5] = hess[5, 0] = -2.0 * v.m2 * ml * v.i12 / k * q2e
    hess[1, 1] = v.m1 * (v.m2 * v.i11 - ml2) / k
    hess[1, 5] = hess[5, 1] = 2.0 * ml / k * (v.m2 * v.i11 - ml2) * q2e
    hess[2, 2] = 1.0 / v.i3
    hess[3, 3] = 4.0 * (v.mgl + (1.0 / v.m3 - 1.0 / v.m2) * q2e * q2e)
    hess[4, 4] = 4.0 * v.mgl
    hess[5, 5] = -4.0 * q2e * q2e / (k * v.m2) \
        * (k - v.m2 ** 2 * planar + v.m2 * ml2 * v.i22)
    return hess


def hessian_determinant(q2e: float, v: VehicleParams) -> float:
    """Closed-form determinant of the reduced Hessian."""
    require_admissible(v)
    if q2e == 0.0:
        raise DegenerateEquilibrium("Q2 must be nonzero for the generic family")
    k = kinetic_scalar(v)
    margin = v.mgl + (1.0 / v.m3 - 1.0 / v.m2) * q2e * q2e
    return 64.0 * v.mgl / (k * v.i3) * (v.m2 - v.m1) * margin * q2e * q2e


def four_conditions(q2e: float, v: VehicleParams) -> tuple[bool, bool, bool, bool]:
    """(Q2 != 0, l > 0, m g l > (1/m2 - 1/m3) Q2^2, m2 > m1)."""
    return (q2e != 0.0,
            v.l > 0.0,
            v.mgl > (1.0 / v.m2 - 1.0 / v.m3) * q2e * q2e,
            v.m2 > v.m1)


def stability_analysis(q2e: float, v: VehicleParams) -> UnderwaterStabilityReport:
    """Four-condition sufficient verdict for the horizontal-translation
    equilibrium, cross-checked against Hessian definiteness.

    When all four conditions hold but the Hessian is not positive definite
    (and not merely Marginal), an InternalInconsistency is raised: the
    theory guarantees the implication, so a violation is a bug.
    """
    u_eq = equilibrium(q2e, v)
    hess = reduced_hessian(q2e, v)
    definiteness = classify_definiteness(hess)
    residual = float(np.sqrt(np.sum(
        fd_gradient(lambda x: reduced_hamiltonian(x[:3], x[3:], q2e, v),
                    np.concatenate([u_eq[PI], np.zeros(3)])) ** 2)))
    conds = four_conditions(q2e, v)
    all_hold = all(conds)
    positive = definiteness.classification is DefinitenessClass.POSITIVE_DEFINITE
    if all_hold and not positive and \
            definiteness.classification is not DefinitenessClass.MARGINAL:
        raise InternalInconsistency(
            "all four stability conditions hold but the Hessian is "
            f"{definiteness.classification.value}")
    verdict = Verdict.STABLE_SUFFICIENT if (all_hold and positive) \
        else Verdict.INCONCLUSIVE
    return UnderwaterStabilityReport(
        equilibrium=u_eq,
        critical_residual=residual,
        hessian=hess,
        determinant_closed_form=hessian_determinant(q2e, v),
        definiteness=definiteness,
        condition_nonzero_q2=conds[0],
        condition_bottom_heavy=conds[1],
        condition_mgl_margin=conds[2],
        condition_mass_order=conds[3],
        verdict=verdict,
    )


def invariant_series(states: np.ndarray, v: VehicleParams) -> np.ndarray:
    """Columns H, C11, C12, C22 evaluated over a state array."""
    states = np.atleast_2d(np.asarray(states, dtype=float))
    kin = kinetic_inverse(v)
    pi = states[:, PI]
    q = states[:, Q]
    gamma = states[:, GAMMA]
    h = 0.5 * (np.einsum("ni,ij,nj->n", pi, kin.a, pi)
               + 2.0 * np.einsum("ni,ij,nj->n", pi, kin.b.T, q)
               + np.einsum("ni,ij,nj->n", q, kin.c, q)
               - 2.0 * v.mgl * gamma[:, 2])
    return np.column_stack([
        h,
        np.sum(q * q, axis=1),
        np.sum(q * gamma, axis=1),
        np.sum(gamma * gamma, axis=1),
    ])


def simulate(v: VehicleParams, u0, dt: float, steps: int) -> Trajectory:
    """Long fixed-step RK4 run with drift monitoring of H, |Q|^2,
    <Q, Gamma>, |Gamma|^2 (drift order matches INVARIANT_NAMES)."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    from . import _kernels  # deferred: pulls in numba

    kin = kinetic_inverse(v)
    par = np.array([
        kin.a[0, 0], kin.a[0, 1], kin.a[1, 1], kin.a[2, 2],
        kin.b[0, 0], kin.b[0, 1], kin.b[1, 0], kin.b[1, 1],
        kin.c[0, 0], kin.c[0, 1], kin.c[1, 1], kin.c[2, 2],
        v.mgl, E3[0], E3[1], E3[2]])
    states = _kernels.underwater_rk4(np.asarray(u0, dtype=float).copy(), par,
                                     float(dt), int(steps))
    check_finite_states(states)
    series = invariant_series(states, v)
    drifts = tuple(relative_drift(series[:, j]) for j in range(series.shape[1]))
    return Trajectory(times=np.arange(steps + 1) * dt, states=states, drifts=drifts)
