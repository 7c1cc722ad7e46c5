"""Underwater vehicle: block inverse, admissibility, dynamics, chart reduction,
closed-form Hessian/determinant, four-condition verdict, I12 independence.

Oracles implemented only here: dense 6x6 inversion against the closed-form
block inverse, the structure-matrix product form of the dynamics, and an
explicit polynomial reconstruction of (Q, Gamma) on the chart.
"""

import math

import numpy as np
import pytest

from leafstab import geom, numerics
from leafstab import underwater as uw
from leafstab.common import Verdict
from leafstab.errors import AdmissibilityError, DegenerateEquilibrium
from leafstab.numerics import DefinitenessClass

from conftest import random_chart_point, random_q2e, random_vehicle


def assembled_blocks(v):
    m_mat, j_mat, d_mat = uw.mass_matrices(v)
    return np.block([[j_mat, d_mat], [d_mat.T, m_mat]])


def assembled_inverse(v):
    kin = uw.kinetic_inverse(v)
    return np.block([[kin.a, kin.b.T], [kin.b, kin.c]])


def structure_matrix(u):
    """Antisymmetric structure matrix of the impulse dynamics (test oracle)."""
    lam = np.zeros((9, 9))
    pi_hat = geom.hat(u[uw.PI])
    q_hat = geom.hat(u[uw.Q])
    gamma_hat = geom.hat(u[uw.GAMMA])
    lam[0:3, 0:3] = pi_hat
    lam[0:3, 3:6] = q_hat
    lam[0:3, 6:9] = gamma_hat
    lam[3:6, 0:3] = q_hat
    lam[6:9, 0:3] = gamma_hat
    return lam


def energy_gradient(u, v):
    """Analytic gradient of the energy (test oracle)."""
    kin = uw.kinetic_inverse(v)
    pi, q = u[uw.PI], u[uw.Q]
    return np.concatenate([kin.a @ pi + kin.b.T @ q,
                           kin.b @ pi + kin.c @ q,
                           -v.mgl * np.array([0.0, 0.0, 1.0])])


def chart_reconstruction_polynomials(p, q2e):
    """(Q, Gamma) on the chart written out as polynomials in p (test oracle)."""
    p1, p2, p3 = p
    w = math.sqrt(1.0 - (p1 * p1 + p2 * p2 + p3 * p3))
    q = np.array([(2 * p1 * p2 - 2 * p3 * w) * q2e,
                  (1 - 2 * p1 ** 2 - 2 * p3 ** 2) * q2e,
                  (2 * p2 * p3 + 2 * p1 * w) * q2e])
    gamma = np.array([2 * p1 * p3 + 2 * p2 * w,
                      2 * p2 * p3 - 2 * p1 * w,
                      1 - 2 * p1 ** 2 - 2 * p2 ** 2])
    return q, gamma


class TestMassMatrices:
    def test_no_offset_means_no_coupling(self, vehicle_ref):
        v = uw.VehicleParams(**{**vehicle_ref.__dict__, "l": 0.0})
        _, _, d_mat = uw.mass_matrices(v)
        assert np.array_equal(d_mat, np.zeros((3, 3)))

    def test_diagonal_inertia(self, vehicle_ref):
        _, j_mat, _ = uw.mass_matrices(vehicle_ref)
        assert np.array_equal(j_mat, np.eye(3))

    def test_coupling_entries(self, vehicle_ref):
        _, _, d_mat = uw.mass_matrices(vehicle_ref)
        expected = np.zeros((3, 3))
        expected[0, 1] = -0.1
        expected[1, 0] = 0.1
        assert np.allclose(d_mat, expected, rtol=0, atol=1e-15)

    def test_rejects_inadmissible(self, vehicle_ref):
        bad = uw.VehicleParams(**{**vehicle_ref.__dict__, "i12": 2.0})
        with pytest.raises(AdmissibilityError):
            uw.mass_matrices(bad)


class TestKineticInverse:
    def test_block_diagonal_limit(self):
        v = uw.VehicleParams(m=1.0, g=9.81, l=0.0, m1=2.0, m2=3.0, m3=4.0,
                             i11=5.0, i12=0.0, i22=6.0, i3=7.0)
        kin = uw.kinetic_inverse(v)
        assert np.allclose(kin.a, np.diag([1 / 5.0, 1 / 6.0, 1 / 7.0]),
                           rtol=0, atol=1e-15)
        assert np.array_equal(kin.b, np.zeros((3, 3)))
        assert np.allclose(kin.c, np.diag([1 / 2.0, 1 / 3.0, 1 / 4.0]),
                           rtol=0, atol=1e-15)
        assert kin.k == pytest.approx(2.0 * 3.0 * 5.0 * 6.0, rel=1e-15)

    def test_reference_vehicle_scalar(self, vehicle_ref):
        # m1 m2 (i11 i22 - i12^2) - m^2 l^2 (m1 i22 + m2 i11) + m^4 l^4
        # = 6 - 0.01 * 5 + 0.0001, by hand
        assert uw.kinetic_inverse(vehicle_ref).k == pytest.approx(5.9501, rel=1e-14)

    def test_dense_inverse_oracle(self, rng):
        for _ in range(50):
            v = random_vehicle(rng)
            product = assembled_inverse(v) @ assembled_blocks(v)
            assert np.max(np.abs(product - np.eye(6))) <= 1e-10

    def test_a_and_c_symmetric_positive_definite(self, rng):
        for _ in range(20):
            v = random_vehicle(rng)
            kin = uw.kinetic_inverse(v)
            assert np.array_equal(kin.a, kin.a.T)
            assert np.array_equal(kin.c, kin.c.T)
            assert numerics.classify_definiteness(kin.a).classification \
                is DefinitenessClass.POSITIVE_DEFINITE
            assert numerics.classify_definiteness(kin.c).classification \
                is DefinitenessClass.POSITIVE_DEFINITE


class TestAdmissibility:
    def test_reference_vehicle_all_pass(self, vehicle_ref):
        report = uw.admissibility(vehicle_ref)
        assert report.admissible and report.physical_ok and report.block_ok

    def test_block_boundary_fails_strict_inequality(self):
        # m1 i22 == m^2 l^2 exactly
        v = uw.VehicleParams(m=1.0, g=9.81, l=0.1, m1=0.01, m2=3.0, m3=1.0,
                             i11=1.0, i12=0.0, i22=1.0, i3=1.0)
        report = uw.admissibility(v)
        assert not report.m1_i22_exceeds_ml2
        assert not report.admissible

    def test_planar_inertia_violation(self, vehicle_ref):
        v = uw.VehicleParams(**{**vehicle_ref.__dict__, "i12": 1.5})
        report = uw.admissibility(v)
        assert not report.planar_det_positive
        assert report.m1_positive and report.i3_positive


class TestVelocities:
    def test_zero_state(self, vehicle_ref):
        omega, vel = uw.velocities(np.zeros(9), vehicle_ref)
        assert np.array_equal(omega, np.zeros(3))
        assert np.array_equal(vel, np.zeros(3))

    def test_no_spin_at_equilibrium(self, rng):
        for _ in range(20):
            v = random_vehicle(rng)
            q2e = random_q2e(rng)
            omega, _ = uw.velocities(uw.equilibrium(q2e, v), v)
            assert np.max(np.abs(omega)) <= 1e-14 * (1.0 + abs(q2e))

    def test_translation_velocity_formula(self, vehicle_ref):
        u_eq = uw.equilibrium(1.0, vehicle_ref)
        kin = uw.kinetic_inverse(vehicle_ref)
        _, vel = uw.velocities(u_eq, vehicle_ref)
        assert np.allclose(vel, kin.b @ u_eq[uw.PI] + kin.c @ u_eq[uw.Q],
                           rtol=0, atol=1e-16)


class TestHamiltonian:
    def test_zero_state(self, vehicle_ref):
        assert uw.hamiltonian(np.zeros(9), vehicle_ref) == 0.0

    def test_pure_potential(self, vehicle_ref):
        u = uw.state_vector(np.zeros(3), np.zeros(3), [0.0, 0.0, 1.0])
        assert uw.hamiltonian(u, vehicle_ref) == pytest.approx(
            -vehicle_ref.mgl, rel=0, abs=0)

    def test_conserved_along_field(self, rng):
        for _ in range(20):
            v = random_vehicle(rng)
            u = rng.normal(size=9)
            udot = uw.vector_field(u, v)
            scale = max(1.0, float(np.max(np.abs(u)) ** 2))
            assert abs(energy_gradient(u, v) @ udot) <= 1e-10 * scale


class TestCasimirs:
    def test_equilibrium_values(self, vehicle_ref):
        assert np.array_equal(uw.casimirs(uw.equilibrium(2.0, vehicle_ref)),
                              [4.0, 0.0, 1.0])

    def test_zero_state(self):
        assert np.array_equal(uw.casimirs(np.zeros(9)), np.zeros(3))

    def test_chart_states_stay_on_leaf(self, rng, vehicle_ref):
        expected = uw.casimirs(uw.equilibrium(1.5, vehicle_ref))
        for _ in range(100):
            u = uw.chart_state(rng.normal(size=3), random_chart_point(rng),
                               1.5, vehicle_ref)
            assert uw.casimirs(u) == pytest.approx(expected, rel=0, abs=1e-12)


class TestVectorField:
    def test_equilibrium_is_fixed_point(self, rng):
        for _ in range(20):
            v = random_vehicle(rng)
            q2e = random_q2e(rng)
            u_eq = uw.equilibrium(q2e, v)
            residual = np.max(np.abs(uw.vector_field(u_eq, v)))
            assert residual <= 1e-12 * (1.0 + np.linalg.norm(u_eq))

    def test_gamma_frozen_without_spin(self, rng, vehicle_ref):
        kin = uw.kinetic_inverse(vehicle_ref)
        for _ in range(10):
            q = rng.normal(size=3)
            pi = np.linalg.solve(kin.a, -kin.b.T @ q)  # forces Omega = 0
            u = uw.state_vector(pi, q, rng.normal(size=3))
            udot = uw.vector_field(u, vehicle_ref)
            assert np.max(np.abs(udot[uw.GAMMA])) <= 1e-12 * max(
                1.0, float(np.max(np.abs(u))))

    def test_equals_structure_matrix_product(self, rng):
        for _ in range(25):
            v = random_vehicle(rng)
            u = rng.normal(size=9)
            direct = uw.vector_field(u, v)
            product = structure_matrix(u) @ energy_gradient(u, v)
            scale = max(1.0, float(np.max(np.abs(product))))
            assert np.max(np.abs(direct - product)) <= 1e-10 * scale

    def test_casimirs_conserved_instantaneously(self, rng):
        for _ in range(20):
            v = random_vehicle(rng)
            u = rng.normal(size=9)
            udot = uw.vector_field(u, v)
            q, gamma = u[uw.Q], u[uw.GAMMA]
            grads = [np.concatenate([np.zeros(3), 2 * q, np.zeros(3)]),
                     np.concatenate([np.zeros(3), gamma, q]),
                     np.concatenate([np.zeros(3), np.zeros(3), 2 * gamma])]
            scale = max(1.0, float(np.max(np.abs(u)) ** 2))
            for grad_c in grads:
                assert abs(grad_c @ udot) <= 1e-10 * scale


class TestEquilibrium:
    def test_no_offset_means_no_momentum(self, vehicle_ref):
        v = uw.VehicleParams(**{**vehicle_ref.__dict__, "l": 0.0})
        assert np.array_equal(uw.equilibrium(2.0, v)[uw.PI], np.zeros(3))

    def test_reference_values(self, vehicle_ref):
        u = uw.equilibrium(2.0, vehicle_ref)
        assert u[0] == pytest.approx(-(1.0 * 0.1 / 3.0) * 2.0, rel=1e-15)
        assert np.array_equal(u[1:6], [0.0, 0.0, 0.0, 2.0, 0.0])
        assert np.array_equal(u[uw.GAMMA], [0.0, 0.0, 1.0])

    def test_degenerate_rejected(self, vehicle_ref):
        with pytest.raises(DegenerateEquilibrium):
            uw.equilibrium(0.0, vehicle_ref)


class TestReducedHamiltonian:
    def test_center_of_chart(self, rng, vehicle_ref):
        pi = rng.normal(size=3)
        u_eq = uw.equilibrium(1.0, vehicle_ref)
        u = uw.state_vector(pi, u_eq[uw.Q], u_eq[uw.GAMMA])
        assert uw.reduced_hamiltonian(pi, np.zeros(3), 1.0, vehicle_ref) == \
            uw.hamiltonian(u, vehicle_ref)

    def test_two_path_equality(self, rng):
        for _ in range(50):
            v = random_vehicle(rng)
            q2e = random_q2e(rng)
            pi = rng.normal(size=3)
            p = random_chart_point(rng)
            q, gamma = chart_reconstruction_polynomials(p, q2e)
            direct = uw.hamiltonian(uw.state_vector(pi, q, gamma), v)
            via_chart = uw.reduced_hamiltonian(pi, p, q2e, v)
            scale = max(1.0, abs(direct))
            assert abs(via_chart - direct) <= 1e-12 * scale

    def test_equilibrium_is_critical_point(self, vehicle_ref):
        x0 = np.concatenate([uw.equilibrium(1.0, vehicle_ref)[uw.PI], np.zeros(3)])
        grad = numerics.fd_gradient(
            lambda x: uw.reduced_hamiltonian(x[:3], x[3:], 1.0, vehicle_ref), x0)
        assert np.linalg.norm(grad) <= 1e-6


class TestReducedHessian:
    def test_reference_entries(self, vehicle_ref):
        hess = uw.reduced_hessian(1.0, vehicle_ref)
        assert hess[2, 2] == 1.0
        assert hess[4, 4] == pytest.approx(4.0 * 1.0 * 9.81 * 0.1, rel=1e-15)

    def test_decoupled_when_no_offset_or_i12(self):
        v = uw.VehicleParams(m=1.0, g=9.81, l=0.0, m1=2.0, m2=3.0, m3=1.0,
                             i11=4.0, i12=0.0, i22=5.0, i3=6.0)
        hess = uw.reduced_hessian(1.0, v)
        assert hess[0, 1] == 0.0 and hess[0, 5] == 0.0 and hess[1, 5] == 0.0
        assert hess[0, 0] == pytest.approx(1.0 / 4.0, rel=1e-14)
        assert hess[1, 1] == pytest.approx(1.0 / 5.0, rel=1e-14)
        off_diag = hess - np.diag(np.diag(hess))
        assert np.max(np.abs(off_diag)) == 0.0

    def test_matches_fd_oracle(self, rng):
        # certifies every closed-form component, the i12 coupling entries,
        # and the zero fill; acceptance runs the full 100
        for _ in range(25):
            v = random_vehicle(rng)
            q2e = random_q2e(rng)
            x0 = np.concatenate([uw.equilibrium(q2e, v)[uw.PI], np.zeros(3)])
            fd = numerics.fd_hessian(
                lambda x: uw.reduced_hamiltonian(x[:3], x[3:], q2e, v), x0)
            closed = uw.reduced_hessian(q2e, v)
            err = np.linalg.norm(fd - closed) / np.linalg.norm(closed)
            assert err <= 1e-6


class TestHessianDeterminant:
    def test_equal_masses_vanish(self, vehicle_ref):
        v = uw.VehicleParams(**{**vehicle_ref.__dict__, "m1": 3.0, "m2": 3.0})
        assert uw.hessian_determinant(1.0, v) == 0.0

    def test_no_offset_vanishes(self, vehicle_ref):
        v = uw.VehicleParams(**{**vehicle_ref.__dict__, "l": 0.0})
        assert uw.hessian_determinant(1.0, v) == 0.0

    def test_eigenvalue_product_identity(self, rng, vehicle_ref):
        cases = [(vehicle_ref, 1.0)]
        cases += [(random_vehicle(rng), random_q2e(rng)) for _ in range(25)]
        for v, q2e in cases:
            closed = uw.hessian_determinant(q2e, v)
            product = float(np.prod(numerics.sym_eigenvalues(
                uw.reduced_hessian(q2e, v))))
            assert product == pytest.approx(closed, rel=1e-8, abs=1e-12)


class TestStabilityAnalysis:
    def test_reference_vehicle_stable(self, vehicle_ref):
        report = uw.stability_analysis(1.0, vehicle_ref)
        assert report.verdict is Verdict.STABLE_SUFFICIENT
        assert report.condition_nonzero_q2 and report.condition_bottom_heavy
        assert report.condition_mgl_margin and report.condition_mass_order
        assert report.definiteness.classification \
            is DefinitenessClass.POSITIVE_DEFINITE
        assert report.critical_residual <= 1e-6

    def test_swapped_masses_inconclusive(self, vehicle_ref):
        v = uw.VehicleParams(**{**vehicle_ref.__dict__, "m1": 3.0, "m2": 2.0})
        report = uw.stability_analysis(1.0, v)
        assert report.verdict is Verdict.INCONCLUSIVE
        assert not report.condition_mass_order

    def test_top_heavy_inconclusive(self, vehicle_ref):
        v = uw.VehicleParams(**{**vehicle_ref.__dict__, "l": 0.0})
        report = uw.stability_analysis(1.0, v)
        assert report.verdict is Verdict.INCONCLUSIVE
        assert not report.condition_bottom_heavy

    def test_conditions_imply_positive_definite(self, rng):
        # acceptance runs 1000; fast spot check with explicit margins
        checked = 0
        while checked < 200:
            v = random_vehicle(rng)
            q2e = random_q2e(rng)
            conds = uw.four_conditions(q2e, v)
            margin = v.mgl - (1.0 / v.m2 - 1.0 / v.m3) * q2e * q2e
            if not all(conds):
                continue
            if margin <= 1e-9 * max(1.0, v.mgl) or \
                    (v.m2 - v.m1) <= 1e-9 * max(1.0, v.m2):
                continue
            report = uw.stability_analysis(q2e, v)
            assert report.definiteness.classification \
                is DefinitenessClass.POSITIVE_DEFINITE
            assert report.verdict is Verdict.STABLE_SUFFICIENT
            checked += 1


class TestI12Independence:
    def test_verdict_invariant_along_sweep(self, vehicle_ref):
        baseline = uw.stability_analysis(1.0, vehicle_ref)
        for i12 in np.linspace(-0.9, 0.9, 21):
            v = uw.VehicleParams(**{**vehicle_ref.__dict__, "i12": float(i12)})
            assert uw.admissibility(v).admissible
            report = uw.stability_analysis(1.0, v)
            assert report.verdict is baseline.verdict
            assert report.definiteness.classification \
                is baseline.definiteness.classification


class TestSimulation:
    def test_fixed_point_stays_put(self, vehicle_ref):
        u_eq = uw.equilibrium(1.0, vehicle_ref)
        traj = uw.simulate(vehicle_ref, u_eq, 1e-3, 200)
        step_moves = np.max(np.abs(np.diff(traj.states, axis=0)))
        assert step_moves <= 1e-12 * (1.0 + np.linalg.norm(u_eq))

    def test_matches_generic_integrator(self, vehicle_ref):
        u0 = uw.equilibrium(1.0, vehicle_ref)
        u0 = u0 + 1e-3 * np.arange(9) / np.linalg.norm(np.arange(9))
        fast = uw.simulate(vehicle_ref, u0, 1e-3, 200)
        generic = numerics.rk4_integrate(
            lambda u: uw.vector_field(u, vehicle_ref), u0, 1e-3, 200)
        assert np.max(np.abs(fast.states - generic.states)) <= 1e-13

    def test_short_conservation_run(self, rng, vehicle_ref):
        u_eq = uw.equilibrium(1.0, vehicle_ref)
        direction = rng.normal(size=9)
        u0 = u_eq + 1e-3 * direction / np.linalg.norm(direction)
        traj = uw.simulate(vehicle_ref, u0, 1e-3, 20_000)
        assert len(traj.drifts) == len(uw.INVARIANT_NAMES)
        assert max(traj.drifts) < 1e-8
        distances = np.sqrt(np.sum((traj.states - u_eq) ** 2, axis=1))
        assert np.max(distances) <= 1e-1
