"""Jitted fixed-step RK4 drivers for the two dynamical systems.

These exist purely for speed on long conservation runs (10^5 to 10^6
steps); each driver performs exactly the classic RK4 recurrence used by
numerics.rk4_integrate, with the vector field inlined. Imported lazily so
that analysis-only entry points never pay the numba import.

Parameter packing:
    spacecraft: (i1, i2, i3, omega_t, k1, k2, k3)
    underwater: (a11, a12, a22, a33, b11, b12, b21, b22,
                 c11, c12, c22, c33, mgl, r1, r2, r3)
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _spacecraft_field(x, par, out):
    i1, i2, i3, omega_t, k1, k2, k3 = par
    p0, p1, p2 = x[0], x[1], x[2]
    a0, a1, a2 = x[3], x[4], x[5]
    b0, b1, b2 = x[6], x[7], x[8]
    g0, g1, g2 = x[9], x[10], x[11]
    # gradient blocks of the energy
    w0 = p0 / i1 + omega_t * b0
    w1 = p1 / i2 + omega_t * b1
    w2 = p2 / i3 + omega_t * b2
    ha0 = 2.0 * k1 * i1 * a0
    ha1 = 2.0 * k1 * i2 * a1
    ha2 = 2.0 * k1 * i3 * a2
    hb0 = omega_t * p0 + 2.0 * k2 * i1 * b0
    hb1 = omega_t * p1 + 2.0 * k2 * i2 * b1
    hb2 = omega_t * p2 + 2.0 * k2 * i3 * b2
    hg0 = 2.0 * k3 * i1 * g0
    hg1 = 2.0 * k3 * i2 * g1
    hg2 = 2.0 * k3 * i3 * g2
    out[0] = (p1 * w2 - p2 * w1) + (a1 * ha2 - a2 * ha1) \
        + (b1 * hb2 - b2 * hb1) + (g1 * hg2 - g2 * hg1)
    out[1] = (p2 * w0 - p0 * w2) + (a2 * ha0 - a0 * ha2) \
        + (b2 * hb0 - b0 * hb2) + (g2 * hg0 - g0 * hg2)
    out[2] = (p0 * w1 - p1 * w0) + (a0 * ha1 - a1 * ha0) \
        + (b0 * hb1 - b1 * hb0) + (g0 * hg1 - g1 * hg0)
    out[3] = a1 * w2 - a2 * w1
    out[4] = a2 * w0 - a0 * w2
    out[5] = a0 * w1 - a1 * w0
    out[6] = b1 * w2 - b2 * w1
    out[7] = b2 * w0 - b0 * w2
    out[8] = b0 * w1 - b1 * w0
    out[9] = g1 * w2 - g2 * w1
    out[10] = g2 * w0 - g0 * w2
    out[11] = g0 * w1 - g1 * w0


@njit(cache=True)
def _underwater_field(x, par, out):
    a11, a12, a22, a33 = par[0], par[1], par[2], par[3]
    b11, b12, b21, b22 = par[4], par[5], par[6], par[7]
    c11, c12, c22, c33 = par[8], par[9], par[10], par[11]
    mgl = par[12]
    r0, r1, r2 = par[13], par[14], par[15]
    p0, p1, p2 = x[0], x[1], x[2]
    q0, q1, q2 = x[3], x[4], x[5]
    g0, g1, g2 = x[6], x[7], x[8]
    # (Omega, v) = (A, B^T; B, C) (Pi, Q) with the sparsity of the
    # third-axis-principal block structure
    o0 = a11 * p0 + a12 * p1 + b11 * q0 + b21 * q1
    o1 = a12 * p0 + a22 * p1 + b12 * q0 + b22 * q1
    o2 = a33 * p2
    v0 = b11 * p0 + b12 * p1 + c11 * q0 + c12 * q1
    v1 = b21 * p0 + b22 * p1 + c12 * q0 + c22 * q1
    v2 = c33 * q2
    out[0] = (p1 * o2 - p2 * o1) + (q1 * v2 - q2 * v1) - mgl * (g1 * r2 - g2 * r1)
    out[1] = (p2 * o0 - p0 * o2) + (q2 * v0 - q0 * v2) - mgl * (g2 * r0 - g0 * r2)
    out[2] = (p0 * o1 - p1 * o0) + (q0 * v1 - q1 * v0) - mgl * (g0 * r1 - g1 * r0)
    out[3] = q1 * o2 - q2 * o1
    out[4] = q2 * o0 - q0 * o2
    out[5] = q0 * o1 - q1 * o0
    out[6] = g1 * o2 - g2 * o1
    out[7] = g2 * o0 - g0 * o2
    out[8] = g0 * o1 - g1 * o0


@njit(cache=True)
def spacecraft_rk4(x0, par, dt, steps):
    n = x0.shape[0]
    states = np.empty((steps + 1, n))
    states[0] = x0
    x = x0.copy()
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)
    for i in range(steps):
        _spacecraft_field(x, par, k1)
        for j in range(n):
            tmp[j] = x[j] + 0.5 * dt * k1[j]
        _spacecraft_field(tmp, par, k2)
        for j in range(n):
            tmp[j] = x[j] + 0.5 * dt * k2[j]
        _spacecraft_field(tmp, par, k3)
        for j in range(n):
            tmp[j] = x[j] + dt * k3[j]
        _spacecraft_field(tmp, par, k4)
        for j in range(n):
            x[j] = x[j] + dt / 6.0 * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j])
        states[i + 1] = x
    return states


@njit(cache=True)
def underwater_rk4(x0, par, dt, steps):
    n = x0.shape[0]
    states = np.empty((steps + 1, n))
    states[0] = x0
    x = x0.copy()
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)
    for i in range(steps):
        _underwater_field(x, par, k1)
        for j in range(n):
            tmp[j] = x[j] + 0.5 * dt * k1[j]
        _underwater_field(tmp, par, k2)
        for j in range(n):
            tmp[j] = x[j] + 0.5 * dt * k2[j]
        _underwater_field(tmp, par, k3)
        for j in range(n):
            tmp[j] = x[j] + dt * k3[j]
        _underwater_field(tmp, par, k4)
        for j in range(n):
            x[j] = x[j] + dt / 6.0 * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j])
        states[i + 1] = x
    return states
