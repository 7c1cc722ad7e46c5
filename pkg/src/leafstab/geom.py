"""Chart machinery shared by both vehicle models.

Scalar-first unit quaternions, the hat map, the quaternion rotation
matrix, the open-ball parametrization of the upper quaternion hemisphere,
and rotation of a reference frame by a chart point. All functions are
pure and operate on plain float64 numpy arrays.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ChartDomainError

# Chart points with |p| >= 1 - CHART_GUARD are rejected so that
# sqrt(1 - |p|^2) stays well conditioned; the stability analysis only
# ever needs a neighborhood of p = 0.
CHART_GUARD = 1e-9

# Norm deviations up to this are treated as rounding and repaired by
# rescaling; anything larger is a logic error in the caller.
QUATERNION_NORM_TOL = 1e-9


def hat(v) -> np.ndarray:
    """Skew matrix of a 3-vector: ``hat(v) @ w == cross(v, w)``."""
    a, b, c = float(v[0]), float(v[1]), float(v[2])
    return np.array([[0.0, -c, b],
                     [c, 0.0, -a],
                     [-b, a, 0.0]])


def unit_quaternion(q) -> np.ndarray:
    """Validate a scalar-first quaternion (q0, q1, q2, q3) and return it unit-normalized."""
    q = np.asarray(q, dtype=float)
    if q.shape != (4,):
        raise ValueError(f"quaternion must have 4 components, got shape {q.shape}")
    n = float(np.sqrt(q @ q))
    if not math.isfinite(n) or abs(n - 1.0) > QUATERNION_NORM_TOL:
        raise ValueError(
            f"quaternion norm {n!r} deviates from 1 by more than {QUATERNION_NORM_TOL:g}")
    return q / n


def rotation_from_quaternion(q) -> np.ndarray:
    """Rotation matrix of a unit quaternion.

    Antipodal quaternions give bit-identical matrices (every entry is a
    sum of pairwise products), which realizes the two-to-one covering of
    the rotation group by the unit quaternions.
    """
    q0, q1, q2, q3 = float(q[0]), float(q[1]), float(q[2]), float(q[3])
    return np.array([
        [q0 * q0 + q1 * q1 - q2 * q2 - q3 * q3,
         2.0 * (q1 * q2 - q0 * q3),
         2.0 * (q1 * q3 + q0 * q2)],
        [2.0 * (q1 * q2 + q0 * q3),
         q0 * q0 - q1 * q1 + q2 * q2 - q3 * q3,
         2.0 * (q2 * q3 - q0 * q1)],
        [2.0 * (q1 * q3 - q0 * q2),
         2.0 * (q2 * q3 + q0 * q1),
         q0 * q0 - q1 * q1 - q2 * q2 + q3 * q3],
    ])


def ball_to_sphere(p) -> np.ndarray:
    """Map a point of the open unit ball to the q0 > 0 quaternion hemisphere.

    Returns (sqrt(1 - |p|^2), p1, p2, p3); inverse of dropping the scalar
    component. Raises ChartDomainError within CHART_GUARD of the boundary.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (3,):
        raise ValueError(f"chart point must have 3 components, got shape {p.shape}")
    s = float(p @ p)
    limit = 1.0 - CHART_GUARD
    if not math.isfinite(s) or s >= limit * limit:
        raise ChartDomainError(
            f"|p| = {math.sqrt(s) if s >= 0 else float('nan'):.17g} outside the "
            f"chart domain |p| < 1 - {CHART_GUARD:g}")
    return np.array([math.sqrt(1.0 - s), p[0], p[1], p[2]])


def rotate_frame(p, e1, e2, e3) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rotate an orthonormal frame by the chart point p.

    The rotation is the one covered by the quaternion ball_to_sphere(p);
    orthonormality and orientation of the frame are preserved.
    """
    r = rotation_from_quaternion(ball_to_sphere(p))
    return r @ np.asarray(e1, dtype=float), r @ np.asarray(e2, dtype=float), \
        r @ np.asarray(e3, dtype=float)


def is_special_orthogonal(m, tol: float) -> bool:
    """True iff ||m^T m - I||_F <= tol and |det(m) - 1| <= tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = np.asarray(m, dtype=float)
    gram = m.T @ m - np.eye(3)
    det = (m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
           - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
           + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0]))
    return float(np.sqrt(np.sum(gram * gram))) <= tol and abs(det - 1.0) <= tol
