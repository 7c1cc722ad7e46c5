"""Shared fixtures: seeded random parameter generators for property tests."""

from __future__ import annotations

import math

import numpy as np
import pytest

from leafstab import spacecraft as sc
from leafstab import underwater as uw


def random_spacecraft_params(rng: np.random.Generator) -> sc.SpacecraftParams:
    """Inertias log-uniform in [0.1, 10], spin rate uniform in [0, 1e-2],
    gravity coefficients uniform in [-1e-6, 1e-6]. Covers both physical
    scales and every sign pattern of the three inequalities."""
    i1, i2, i3 = np.exp(rng.uniform(math.log(0.1), math.log(10.0), size=3))
    return sc.SpacecraftParams(
        i1=float(i1), i2=float(i2), i3=float(i3),
        omega_t=float(rng.uniform(0.0, 1e-2)),
        k1=float(rng.uniform(-1e-6, 1e-6)),
        k2=float(rng.uniform(-1e-6, 1e-6)),
        k3=float(rng.uniform(-1e-6, 1e-6)))


def random_vehicle(rng: np.random.Generator) -> uw.VehicleParams:
    """Masses and inertias log-uniform in [0.5, 5]; I12 uniform inside
    0.9 sqrt(i11 i22); m*l drawn so that m^2 l^2 < 0.5 min(m1 i22, m2 i11);
    draws with k <= 0 are rejected. Strong I12 coupling is deliberately
    covered."""
    while True:
        m1, m2, m3, i11, i22, i3, m = np.exp(
            rng.uniform(math.log(0.5), math.log(5.0), size=7))
        i12 = float(rng.uniform(-0.9, 0.9) * math.sqrt(i11 * i22))
        ml2 = rng.uniform(0.0, 0.5) * min(m1 * i22, m2 * i11)
        l = math.sqrt(ml2) / m
        v = uw.VehicleParams(m=float(m), g=9.81, l=float(l),
                             m1=float(m1), m2=float(m2), m3=float(m3),
                             i11=float(i11), i12=i12, i22=float(i22), i3=float(i3))
        if uw.kinetic_scalar(v) > 0.0:
            return v


def random_q2e(rng: np.random.Generator) -> float:
    """Magnitude uniform in [0.2, 3], random sign; zero is excluded because
    the generic equilibrium family requires it."""
    return float(rng.choice([-1.0, 1.0]) * rng.uniform(0.2, 3.0))


def random_chart_point(rng: np.random.Generator, max_norm: float = 0.9) -> np.ndarray:
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    return v * rng.uniform(0.0, max_norm)


def random_unit_quaternion(rng: np.random.Generator) -> np.ndarray:
    q = rng.normal(size=4)
    return q / np.linalg.norm(q)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260810)


@pytest.fixture
def vehicle_ref() -> uw.VehicleParams:
    """The reference bottom-heavy vehicle used across the suite."""
    return uw.VehicleParams(m=1.0, g=9.81, l=0.1, m1=2.0, m2=3.0, m3=1.0,
                            i11=1.0, i12=0.0, i22=1.0, i3=1.0)


@pytest.fixture(scope="session")
def castalia_feasible_radius() -> float:
    radii = sc.stationary_orbit_radii(sc.castalia_preset())
    return max(r.radius for r in radii if r.feasible)


@pytest.fixture
def castalia_params(castalia_feasible_radius) -> sc.SpacecraftParams:
    """Castalia coefficients at the feasible stationary orbit, inertia (2, 3, 1)."""
    return sc.SpacecraftParams.from_asteroid(
        sc.castalia_preset(), (2.0, 3.0, 1.0), castalia_feasible_radius)
